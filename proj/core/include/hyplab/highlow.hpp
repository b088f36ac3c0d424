#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hyplab/nls_dynamics.hpp"

namespace hyplab {

// phi = A sum_k xi_k (1 + lambda_k)^{-s/2} k^{-1/2-delta} v_k with unit-modulus
// random phases xi_k and delta = rough_datum_delta. ||phi||_{H^sigma} stays
// bounded under refinement for sigma <= s and grows for sigma > s.
inline constexpr double rough_datum_delta = 0.05;
RadialField make_rough_datum(const SpectralOperator& op, double s, std::uint64_t seed,
                             double amplitude = 1.0);

struct DatumSplit {
  RadialField low;   // eta0 = e^{s0 Delta} phi
  RadialField high;  // psi0 = phi - eta0
};
DatumSplit split_datum(const SpectralOperator& op, const RadialField& phi, double s0);

struct BudgetParameters {
  double critical_exponent = 0.0;   // s_c = 1 - 2/(p-1)
  double m_exponent = 0.0;          // M = s0^{m_exponent}
  double m = 0.0;
  double increment_exponent = 0.0;  // (p+3)/4 s - (p+2)/4
  double threshold = 0.0;           // (3p-6)/(3p-5)
};
BudgetParameters budget_parameters(double s, int p, double s0);
double increment_exponent(double s, int p);
double regularity_threshold(int p);
double critical_exponent(int p);

struct HighLowConfig {
  double s0 = 1e-2;
  double epsilon = 1e-2;
  // regularity of the datum; also the H^s index monitored on u
  double s = 0.9;
  FlowConfig flow;
  std::size_t max_intervals = 10000;

  void validate() const;
};

// One interval [a_i, a_{i+1}] of the partition. Spacetime norms are trapezoid
// sums over the solver steps inside the interval; sups are over the same
// steps.
struct IntervalRecord {
  std::size_t index = 0;
  double a_start = 0.0;
  double a_end = 0.0;
  bool partial = false;  // closed at t_end before the budget was spent
  double l4_budget = 0.0;          // int int |u|^4 over the interval
  double energy_start = 0.0;       // E(zeta(a_i)), zeta = u - psi
  double energy_increment = 0.0;   // E(zeta(a_{i+1})) - E(zeta(a_i))
  double zeta1_energy_drift = 0.0; // E(zeta1(a_{i+1})) - E(zeta1(a_i))
  double zeta2_start_l2 = 0.0;     // ||zeta2(a_i)||_2
  double zeta2_l4 = 0.0;           // ||zeta2||_{L^4_{t,x}}
  double zeta2_sup_l2 = 0.0;
  double zeta2_sup_h1 = 0.0;
  double zeta1_l4_4 = 0.0;         // ||zeta1||^4_{L^4_{t,x}}
  double psi_l4 = 0.0;             // ||psi||_{L^4_{t,x}}
  double u_hs_start = 0.0;         // ||u(a_i)||_{H^s}
  // sup_t ||w^{1/2} f||_inf with w the volume density (sinh r on H^2)
  double weighted_sup_psi = 0.0;
  double weighted_sup_zeta1 = 0.0;
  double weighted_sup_zeta2 = 0.0;
  std::size_t steps = 0;
};

struct HighLowLedger {
  HighLowConfig config;
  double datum_energy = 0.0;   // E(phi)
  double low_energy = 0.0;     // E(eta0)
  double psi0_l2 = 0.0;
  double eta0_h1 = 0.0;
  double u_hs_max = 0.0;       // max over interval starts and t_end
  double u_mass_drift = 0.0;   // relative, at the last completed step
  bool under_resolved = false;
  std::vector<IntervalRecord> intervals;

  // max_i ΔE_i; entries below increment_floor() count as zero.
  double max_positive_increment() const;
  // 100 unit roundoffs of the energy scale of zeta.
  double increment_floor() const;
  double max_weighted_sup_psi() const;
  double max_weighted_sup_zeta1() const;
  double max_weighted_sup_zeta2() const;
  double max_zeta2_h1() const;
};

// NaN/overflow or an interval count above the cap; carries the ledger of the
// intervals completed so far.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, HighLowLedger partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const HighLowLedger& partial() const noexcept { return partial_; }

 private:
  HighLowLedger partial_;
};

// Evolves u (full NLS from phi), psi (linear flow of psi0, exact) and zeta1
// (NLS restarted from zeta = u - psi at every a_i) in lockstep. The interval
// ends are the first solver steps at which the cumulative int int |u|^4
// reaches i * epsilon; zeta2 = u - psi - zeta1 vanishes at each a_i.
HighLowLedger run_highlow(const SpectralOperator& op, const RadialField& phi, const HighLowConfig& cfg);

struct ScalingPoint {
  double s0 = 0.0;
  double max_increment = 0.0;  // positive part, 0 below the floor
  bool usable = false;
  std::size_t interval_count = 0;
  double u_hs_max = 0.0;
  double zeta2_h1 = 0.0;
  double weighted_sup_psi = 0.0;
  double weighted_sup_zeta1 = 0.0;
  double weighted_sup_zeta2 = 0.0;
  double eta0_h1 = 0.0;
  double psi0_l2 = 0.0;
};

struct ScalingReport {
  double s = 0.0;
  int p = 3;
  std::vector<ScalingPoint> points;  // sorted by decreasing s0
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  double predicted_exponent = 0.0;
  // single C with max_increment <= C s0^{predicted_exponent} at every point
  double fitted_constant = 0.0;
  // index into points from which increments are non-increasing as s0 drops
  std::size_t onset_index = 0;
  double onset_s0 = 0.0;
  // single C with ||u(a_i)||_{H^s} <= C s0^{s(s-1)/2} across the sweep
  double hs_bound_constant = 0.0;
  double zeta2_h1_slope = 0.0;
  double psi_sup_slope = 0.0;
  double zeta1_sup_slope = 0.0;
  double zeta2_sup_slope = 0.0;
};

// Requires >= 4 values of s0 spanning >= 1.5 decades (ConfigError); throws
// StudyError when fewer than 4 points have increments above the floor.
// Sweep points run on up to `jobs` threads.
ScalingReport increment_scaling_study(const SpectralOperator& op, const RadialField& phi,
                                      const std::vector<double>& s0_list, const HighLowConfig& base,
                                      unsigned jobs = 1);

}  // namespace hyplab
