#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hyplab/errors.hpp"
#include "hyplab/heat_lp.hpp"
#include "hyplab/sampling.hpp"
#include "support.hpp"

using namespace hyplab;
using hyplab::testing::hyperbolic;

namespace {

std::vector<RadialField> sample_fields(const SpectralOperator& op, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RadialField> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(i % 2 == 0 ? random_smooth_field(op.grid(), rng) : random_spectral_field(op, rng, 1.5));
  }
  return out;
}

}  // namespace

TEST(HeatLP, HeatIdentityAndEigenvector) {
  const auto& op = hyperbolic();
  const RadialField f = sample_fields(op, 1, 1)[0];
  EXPECT_LE(op.grid().l2_norm(heat(op, 0.0, f) - f), 1e-12 * op.grid().l2_norm(f));
  const RadialField v = op.eigenvector(7);
  const double s = 0.3;
  const RadialField hv = heat(op, s, v);
  EXPECT_LE(op.grid().l2_norm(hv - std::exp(-s * op.eigenvalues()[7]) * v), 1e-12);
  EXPECT_THROW(heat(op, -1e-3, f), DomainError);
}

TEST(HeatLP, ContractionAtSpectralGapRate) {
  const auto& op = hyperbolic();
  for (const auto& f : sample_fields(op, 20, 2)) {
    for (double s : {0.01, 0.5, 3.0, 20.0}) {
      EXPECT_LE(op.grid().l2_norm(heat(op, s, f)), std::exp(-s / 4.0) * op.grid().l2_norm(f) * (1 + 1e-12));
    }
  }
}

TEST(HeatLP, Semigroup) {
  const auto& op = hyperbolic();
  const RadialField f = sample_fields(op, 1, 3)[0];
  const RadialField a = heat(op, 0.2, heat(op, 0.05, f));
  const RadialField b = heat(op, 0.25, f);
  EXPECT_LE(op.grid().l2_norm(a - b), 1e-10 * op.grid().l2_norm(f));
}

TEST(HeatLP, BandSingleModePeaksAtInverseEigenvalue) {
  const auto& op = hyperbolic();
  const std::size_t k = 20;
  const double lambda = op.eigenvalues()[k];
  const RadialField v = op.eigenvector(k);
  const auto svals = log_space(1e-3 / lambda, 1e3 / lambda, 601);
  double best_s = 0, best = 0;
  for (double s : svals) {
    const double c = std::abs(op.grid().inner(band(op, s, v), v));
    EXPECT_NEAR(c, s * lambda * std::exp(-s * lambda), 1e-12);
    if (c > best) {
      best = c;
      best_s = s;
    }
  }
  EXPECT_NEAR(best, std::exp(-1.0), 1e-4);
  EXPECT_NEAR(std::log(best_s * lambda), 0.0, 0.02);
  EXPECT_THROW(band(op, 0.0, v), DomainError);
}

TEST(HeatLP, BandSymbolIntegratesToOne) {
  // int_0^inf x e^{-x} dx/x = 1, midpoint rule in log x
  const double lambda = 3.7;
  double sum = 0;
  const double lo = std::log(1e-12), hi = std::log(1e3);
  const int m = 20000;
  const double d = (hi - lo) / m;
  for (int i = 0; i < m; ++i) sum += band_symbol(std::exp(lo + (i + 0.5) * d), lambda) * d;
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(HeatLP, BandBoundedByInput) {
  const auto& op = hyperbolic();
  const auto times = ladder_times(op);
  for (const auto& f : sample_fields(op, 50, 4)) {
    for (std::size_t j = 0; j < times.size(); j += 4) {
      EXPECT_LE(op.grid().l2_norm(band(op, times[j], f)), op.grid().l2_norm(f));
    }
  }
}

TEST(HeatLP, LowPlusHighIsIdentity) {
  const auto& op = hyperbolic();
  for (const auto& f : sample_fields(op, 5, 5)) {
    for (double s : {1e-4, 0.1, 10.0}) {
      const RadialField sum = low_pass(op, s, f) + high_pass(op, s, f);
      EXPECT_LE((sum - f).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, f.cwiseAbs().maxCoeff()));
    }
  }
  EXPECT_THROW(low_pass(op, 0.0, sample_fields(op, 1, 5)[0]), DomainError);
  EXPECT_THROW(high_pass(op, -1.0, sample_fields(op, 1, 5)[0]), DomainError);
}

TEST(HeatLP, HighPassMatchesIntegratedBandOnEveryMode) {
  const auto& op = hyperbolic();
  const double s = 0.05;
  // Reference: int_0^s s' lambda e^{-s' lambda} ds'/s' by Gauss-Legendre on [0, s].
  static const double x[] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                             -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                             0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                             0.9739065285171717};
  static const double w[] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                             0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                             0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                             0.0666713443086881};
  for (std::size_t k = 0; k < op.size(); k += 5) {
    const double lambda = op.eigenvalues()[k];
    // Split [0, s] into panels short compared with 1/lambda.
    const int panels = 1 + static_cast<int>(s * lambda);
    double integral = 0;
    for (int p = 0; p < panels; ++p) {
      const double a = s * p / panels, b = s * (p + 1) / panels;
      for (int i = 0; i < 10; ++i) {
        const double t = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
        integral += 0.5 * (b - a) * w[i] * lambda * std::exp(-t * lambda);
      }
    }
    EXPECT_NEAR(high_pass_symbol(s, lambda), integral, 1e-12) << "k=" << k;
    const RadialField v = op.eigenvector(k);
    EXPECT_NEAR(std::abs(op.grid().inner(high_pass(op, s, v), v)), 1.0 - std::exp(-s * lambda), 1e-12);
  }
}

TEST(HeatLP, LadderCoversSpectrumAndReconstructs) {
  const auto& op = hyperbolic();
  const auto times = ladder_times(op);
  ASSERT_EQ(times.size(), 64u);
  EXPECT_LE(times.front(), 1.0 / (4.0 * op.lambda_max()));
  EXPECT_GE(times.back(), 4.0 / op.lambda_min());
  EXPECT_THROW(ladder_times(op, 31), ConfigError);
  for (const auto& f : sample_fields(op, 6, 6)) {
    const LPLadder ladder = make_ladder(op, f);
    EXPECT_LE(reconstruction_residual(op, ladder, f), 1e-6);
    // Without the tails the ladder alone already captures most of f.
    EXPECT_LE(op.grid().l2_norm(ladder_sum(ladder) - f), 1e-2 * op.grid().l2_norm(f));
  }
}

TEST(HeatLP, LadderIndependentOfThreadCount) {
  const auto& op = hyperbolic();
  const RadialField f = sample_fields(op, 1, 7)[0];
  const LPLadder one = make_ladder(op, f, 48, 1);
  const LPLadder four = make_ladder(op, f, 48, 4);
  ASSERT_EQ(one.bands.size(), four.bands.size());
  for (std::size_t j = 0; j < one.bands.size(); ++j) EXPECT_EQ(one.bands[j], four.bands[j]);
}

TEST(HeatLP, BernsteinSweepBounded) {
  const auto& op = hyperbolic();
  const auto svals = log_space(1e-3, 1e2, 21);
  for (const auto& f : sample_fields(op, 50, 8)) {
    for (const auto& row : bernstein_sweep(op, f, 0.75, 0.25, svals)) {
      EXPECT_LE(row.r_low, 1.5);
      EXPECT_LE(row.r_high, 1.5);
    }
  }
}

TEST(HeatLP, BernsteinSingleModeAndHomogeneity) {
  const auto& op = hyperbolic();
  const std::size_t k = 12;
  const double lambda = op.eigenvalues()[k];
  const RadialField v = op.eigenvector(k);
  const auto svals = log_space(1e-3, 1e1, 9);
  // On a mode R_high = x^{alpha-beta} e^{-x} with x = s lambda, at most (1/(2e))^{1/2} here.
  const auto rows = bernstein_sweep(op, v, 0.75, 0.25, svals);
  for (const auto& row : rows) {
    const double x = row.s * lambda;
    EXPECT_NEAR(row.r_high, std::sqrt(x) * std::exp(-x), 1e-10);
    EXPECT_LE(row.r_high, std::sqrt(0.5 / std::exp(1.0)) + 1e-12);
  }
  const RadialField f = sample_fields(op, 1, 9)[0];
  const auto a = bernstein_sweep(op, f, 0.75, 0.25, svals);
  const auto b = bernstein_sweep(op, std::complex<double>(-3.0, 2.0) * f, 0.75, 0.25, svals);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].r_low, b[i].r_low, 1e-12 * a[i].r_low);
    EXPECT_NEAR(a[i].r_high, b[i].r_high, 1e-12 * a[i].r_high);
  }
  EXPECT_THROW(bernstein_sweep(op, f, 0.25, 0.75, svals), ConfigError);
  EXPECT_THROW(bernstein_sweep(op, f, 1.5, 0.25, svals), ConfigError);
  EXPECT_THROW(bernstein_sweep(op, f, 0.5, -0.1, svals), ConfigError);
}

TEST(HeatLP, SmoothingPowerSharpBound) {
  const auto& op = hyperbolic();
  for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
    const double bound = smoothing_power_bound(alpha);
    EXPECT_NEAR(bound, std::pow(alpha / std::exp(1.0), alpha), 1e-15);
    for (const auto& f : sample_fields(op, 10, 10)) {
      for (double s : {1e-4, 1e-2, 1.0, 10.0}) {
        EXPECT_LE(smoothing_power_norm(op, s, alpha, f), bound * op.grid().l2_norm(f) * (1 + 1e-12));
      }
    }
    // Attained on a mode with s lambda = alpha.
    const RadialField v = op.eigenvector(30);
    const double s = alpha / op.eigenvalues()[30];
    EXPECT_NEAR(smoothing_power_norm(op, s, alpha, v), bound, 1e-10);
  }
}

TEST(HeatLP, LogSpace) {
  const auto v = log_space(1e-3, 1e2, 6);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_NEAR(v[0], 1e-3, 1e-18);
  EXPECT_NEAR(v[5], 1e2, 1e-12);
  EXPECT_NEAR(v[1], 1e-2, 1e-15);
}
