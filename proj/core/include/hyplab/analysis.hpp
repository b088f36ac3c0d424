#pragma once

#include <string>
#include <vector>

#include "hyplab/nls_dynamics.hpp"

namespace hyplab {

// (1/q, 1/r) in {(0, 1/2] x (0, 1/2) : 2/q + d/r >= d/2} or the corner (0, 1/2).
// q, r in [2, inf] (inf allowed), ConfigError otherwise.
bool is_admissible(double q, double r, int d = 2);

// ||u||_{L^q_t L^r_x} over the snapshots: weighted grid L^r in space,
// trapezoid L^q in time, max for an infinite exponent.
double spacetime_norm(const RadialGrid& grid, const Trajectory& traj, double q, double r);

// M_a(f) = 2 Im int a'(r) conj(f) f_r w dr, evaluated on the cell faces with
// the staggered derivative and face averages.
double morawetz_action(const GeometryBackend& backend, const RadialGrid& grid, const RadialField& f);
double morawetz_action(const SpectralOperator& op, const RadialField& f);

// |grad f| at the nodes: mean of the two adjacent face derivatives (zero
// flux at the origin, Dirichlet at r_max).
Eigen::VectorXd gradient_magnitude(const RadialGrid& grid, const RadialField& f);

struct InequalityReport {
  std::string name;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double constant = 0.0;  // max lhs/rhs over samples with rhs > 0
  std::size_t samples = 0;
  double cap = 10.0;
  bool pass = false;      // constant <= cap and valid
  bool valid = true;      // false when a precondition check failed
  std::string note;
};

// Fills constant/samples/pass from lhs and rhs. Samples with lhs = rhs = 0
// are skipped; lhs > 0 with rhs = 0 gives an infinite constant.
InequalityReport make_report(std::string name, std::vector<double> lhs, std::vector<double> rhs,
                             double cap);

// |M_a(f)| against ||f||_2 ||f||_{H^1}, one sample per field.
InequalityReport check_morawetz_bound(const SpectralOperator& op, const std::vector<RadialField>& samples,
                                      double cap = 2.0);

// |u|^2 u - |zeta|^2 zeta.
RadialField cubic_difference(const RadialField& u, const RadialField& zeta);
// The same with u = psi + zeta, grouped by powers of psi.
struct CubicExpansion {
  RadialField cubic;      // |psi|^2 psi
  RadialField quadratic;  // psi^2 conj(zeta) + 2 |psi|^2 zeta
  RadialField linear;     // zeta^2 conj(psi) + 2 |zeta|^2 psi
  RadialField sum() const { return cubic + quadratic + linear; }
};
CubicExpansion cubic_expansion(const RadialField& psi, const RadialField& zeta);

struct DuhamelResidual {
  double max_relative = 0.0;  // max_j ||R_j|| / (tau_j sup ||G||)
  std::vector<double> per_step;
};
// Trapezoid Duhamel residual of i u_t + Delta u = |u|^{p-1}u + N between
// consecutive snapshots; `forcing` may be empty (N = 0).
DuhamelResidual duhamel_residual(const SpectralOperator& op, const Trajectory& u,
                                 const std::vector<RadialField>& forcing);

// int int |u|^4 against sup ||u||_2 sup ||u||_{H^1} + ||N conj(u)||_{L^1} +
// ||N grad conj(u)||_{L^1}, over the windows [0, t_j] for every snapshot j.
// The report is flagged invalid when the Duhamel residual exceeds
// residual_tolerance.
InequalityReport check_modified_morawetz(const SpectralOperator& op, const Trajectory& u,
                                         const std::vector<RadialField>& forcing, double cap = 10.0,
                                         double residual_tolerance = 0.1);

// <x> on H^2 is not canonical; both readings are exposed.
enum class WeightConvention { Polynomial, Cosh };  // (1+r^2)^{1/2} or cosh r
std::string_view to_string(WeightConvention w);
WeightConvention parse_weight_convention(std::string_view name);

// Closed-form evaluation of || <x>^{-1/2-eps} (-Delta)^{1/4} e^{it Delta} f ||_{L^2_{t,x}([0,T])}
// in the eigenbasis; the time integral of each mode pair is exact.
class LocalSmoothing {
 public:
  LocalSmoothing(const SpectralOperator& op, double eps = 0.1,
                 WeightConvention weight = WeightConvention::Polynomial);
  double lhs(const RadialField& f, double t_end) const;
  double ratio(const RadialField& f, double t_end) const;
  double eps() const noexcept { return eps_; }
  WeightConvention weight() const noexcept { return weight_; }
  // rho(r)^2 = <x>^{-1-2 eps}
  double weight_squared(double r) const;

 private:
  const SpectralOperator* op_;
  double eps_;
  WeightConvention weight_;
  Eigen::MatrixXd gram_;  // V^T diag(rho^2) V
};

struct LocalSmoothingReport {
  InequalityReport report;           // largest horizon
  std::vector<double> horizons;
  std::vector<std::vector<double>> ratios;  // [sample][horizon]
  double max_last_growth = 0.0;      // max over samples of ratio(T_last)/ratio(T_prev)
  bool saturated = false;            // max_last_growth <= 1.05
};
LocalSmoothingReport check_local_smoothing(const SpectralOperator& op, const std::vector<RadialField>& samples,
                                           const std::vector<double>& horizons, double eps = 0.1,
                                           WeightConvention weight = WeightConvention::Polynomial,
                                           double cap = 10.0);

struct RadialSobolevReport {
  InequalityReport weighted;  // ||w^{1/2} f||_inf vs ||f||^{1/2} ||grad f||^{1/2}
  std::vector<double> alphas;
  std::vector<InequalityReport> alpha_variants;
  InequalityReport gagliardo_nirenberg;  // ||f||_inf vs ||f||_4^{1/2} ||grad f||_4^{1/2}
  bool pass() const;
};
// ||w^{1/2} f||_inf against ||f||_2^{1-1/(4 alpha)} ||(-Delta)^alpha f||_2^{1/(4 alpha)}
// for 1/4 < alpha < 1.
double radial_sobolev_alpha_rhs(const SpectralOperator& op, const RadialField& f, double alpha);
RadialSobolevReport check_radial_sobolev(const SpectralOperator& op, const std::vector<RadialField>& samples,
                                         const std::vector<double>& alphas = {0.3, 0.5, 0.9},
                                         double cap = 10.0);

struct ScatteringReport {
  std::vector<double> times;
  double s = 0.0;
  // ||w(t_{i+1}) - w(t_i)||_{H^s}, w(t) = e^{-it Delta} u(t)
  std::vector<double> differences;
  // differences[i+1] / differences[i]
  std::vector<double> decrement_ratios;
  bool decreasing() const;
};
// Each time must match a snapshot (DomainError otherwise); >= 3 increasing times.
ScatteringReport scattering_diagnostic(const SpectralOperator& op, const Trajectory& u, double s,
                                       const std::vector<double>& times);

}  // namespace hyplab
