#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "hyplab/spectral_operator.hpp"

namespace hyplab {

// Defocusing power NLS  i u_t + Delta u = |u|^{p-1} u + F(t, u).
struct FlowConfig {
  int p = 3;
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t record_every = 1;
  // sigma of the H^sigma monitor stored in each snapshot.
  double sobolev_index = 0.5;
  // When false the power term is dropped and only the forcing drives the
  // flow (difference equations with zero self-interaction).
  bool self_interaction = true;

  // Throws ConfigError: dt > 0, t_end >= 0, p >= 3, record_every >= 1.
  void validate() const;
  std::size_t steps() const;
  // dt * lambda_max; values above pi mean the top of the spectrum is not
  // resolved in time (the exact linear substep keeps the scheme stable).
  double resolution_number(const SpectralOperator& op) const;
};

struct TrajectorySnapshot {
  double t = 0.0;
  RadialField field;
  double mass = 0.0;
  double energy = 0.0;
  // trapezoid integral of int |u|^4 dmu over [0, t], accumulated every step
  double l4_cum = 0.0;
  double h1 = 0.0;
  double hs = 0.0;
};

struct Trajectory {
  FlowConfig config;
  std::vector<TrajectorySnapshot> snapshots;
  bool under_resolved = false;

  std::vector<double> times() const;
  const TrajectorySnapshot& back() const { return snapshots.back(); }
};

// Numerical blow-up (NaN or overflow) during integration; carries everything
// recorded up to the last good step.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }
  const TrajectorySnapshot& last_good() const { return partial_.snapshots.back(); }

 private:
  Trajectory partial_;
};

// F(t, state) in i u_t + Delta u = ... + F.
using Forcing = std::function<RadialField(double t, const RadialField& state)>;

double mass(const RadialGrid& grid, const RadialField& f);
// int |grad f|^2 / 2 + |f|^{p+1}/(p+1); the kinetic part is <-Delta f, f>/2.
double energy(const SpectralOperator& op, const RadialField& f, int p = 3);
double potential_energy(const RadialGrid& grid, const RadialField& f, int p = 3);
// int |f|^4 dmu
double l4_density(const RadialGrid& grid, const RadialField& f);
// |f|^{p-1} f
RadialField power_nonlinearity(const RadialField& f, int p = 3);

// e^{it Delta} f.
RadialField evolve_linear(const SpectralOperator& op, const RadialField& f, double t);

// Strang splitting: exact half-step of the linear flow in the eigenbasis, the
// pointwise phase u <- u exp(-i |u|^{p-1} dt) and, when present, the forcing
// integrated at the midpoint time t + dt/2 (explicit-midpoint half kicks on
// either side of the phase), then the second linear half-step.
Trajectory evolve_nls(const SpectralOperator& op, const RadialField& f0, const FlowConfig& cfg,
                      const Forcing& forcing = {});

// exp(-i tau lambda_k) for every mode.
Eigen::VectorXcd linear_phase(const SpectralOperator& op, double tau);
// Forcing-free Strang step applied to every column of a coefficient matrix
// (several flows advanced with one transform per half).
void strang_step(const SpectralOperator& op, const Eigen::VectorXcd& half_phase,
                 Eigen::MatrixXcd& coefficients, double dt, int p);

// Piecewise-linear interpolation in time of precomputed forcing samples.
Forcing interpolated_forcing(std::vector<double> times, std::vector<RadialField> values);

struct Zeta2Comparison {
  std::vector<double> times;
  // u - psi - zeta1
  std::vector<RadialField> algebraic;
  // Integrated from zero data with forcing |u|^{p-1}u - |zeta1|^{p-1}zeta1.
  std::vector<RadialField> direct;
  std::vector<double> discrepancy;  // ||direct - algebraic||_2 per time
  double max_discrepancy = 0.0;     // L^inf_t L^2_x
  double forcing_scale = 0.0;       // sup_t ||forcing||_2
};

// Three trajectories on the same time grid (ConfigError otherwise).
Zeta2Comparison solve_difference_zeta2(const SpectralOperator& op, const Trajectory& u,
                                       const Trajectory& psi, const Trajectory& zeta1);

// CSV with header t,mass,energy,l4_cum,h1,hs.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// Binary dump: little-endian float64; header (snapshot count, n), then per
// snapshot t followed by n real parts and n imaginary parts.
void write_field_dump(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace hyplab
