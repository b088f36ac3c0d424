#pragma once

#include <vector>

#include "hyplab/spectral_operator.hpp"

namespace hyplab {

// Heat-flow Littlewood-Paley calculus. Naming is by frequency content:
//   low_pass(s)  = e^{s Delta} f        (smoothed, LOW frequencies)
//   high_pass(s) = f - e^{s Delta} f    (HIGH frequencies)
//   band(s)      = s (-Delta) e^{s Delta} f, frequencies ~ s^{-1/2}
// so that f = int_0^inf band(s) ds/s and high_pass(s) = int_0^s band(s') ds'/s'.

RadialField heat(const SpectralOperator& op, double s, const RadialField& f);
RadialField band(const SpectralOperator& op, double s, const RadialField& f);
RadialField low_pass(const SpectralOperator& op, double s, const RadialField& f);
RadialField high_pass(const SpectralOperator& op, double s, const RadialField& f);

// Mode-wise symbols of the operators above, x = s * lambda.
double heat_symbol(double s, double lambda);
double band_symbol(double s, double lambda);
double high_pass_symbol(double s, double lambda);

struct LPLadder {
  std::vector<double> s_values;  // log-uniform, increasing
  double log_step = 0.0;         // Delta(log s)
  std::vector<RadialField> bands;
};

// Ladder of `m` (>= 32) heat times covering [1e-5/lambda_max, 25/lambda_min],
// which contains the band peaks of every mode.
std::vector<double> ladder_times(const SpectralOperator& op, std::size_t m = 64);
// Bands are evaluated concurrently across `jobs` threads; the result does not
// depend on the schedule.
LPLadder make_ladder(const SpectralOperator& op, const RadialField& f, std::size_t m = 64,
                     unsigned jobs = 1);

// Trapezoid in log s over the ladder plus the exact mode-wise tails
// high_pass(s_1) f and low_pass(s_m) f.
RadialField reconstruct(const SpectralOperator& op, const LPLadder& ladder, const RadialField& f);
// Ladder sum alone, without tails.
RadialField ladder_sum(const LPLadder& ladder);
double reconstruction_residual(const SpectralOperator& op, const LPLadder& ladder,
                               const RadialField& f);

struct BernsteinRow {
  double s = 0.0;
  // ||(-Delta)^beta high_pass(s) f|| / (s^{alpha-beta} ||(-Delta)^alpha f||)
  double r_low = 0.0;
  // ||(-Delta)^alpha low_pass(s) f|| / (s^{beta-alpha} ||(-Delta)^beta f||)
  double r_high = 0.0;
};

// Requires 0 <= beta < alpha < beta + 1 (ConfigError otherwise).
std::vector<BernsteinRow> bernstein_sweep(const SpectralOperator& op, const RadialField& f,
                                          double alpha, double beta,
                                          const std::vector<double>& s_list);

// ||s^alpha (-Delta)^alpha e^{s Delta} f||_2 and its sharp bound (alpha/e)^alpha ||f||_2.
double smoothing_power_norm(const SpectralOperator& op, double s, double alpha, const RadialField& f);
double smoothing_power_bound(double alpha);

std::vector<double> log_space(double lo, double hi, std::size_t count);

}  // namespace hyplab
