#include <cmath>

#include <gtest/gtest.h>

#include "hyplab/errors.hpp"
#include "hyplab/fit.hpp"
#include "hyplab/heat_lp.hpp"
#include "hyplab/highlow.hpp"
#include "support.hpp"

using namespace hyplab;
using hyplab::testing::gaussian;
using hyplab::testing::hyperbolic;

namespace {

HighLowConfig run_config(double s0, double epsilon, double t_end) {
  HighLowConfig cfg;
  cfg.s0 = s0;
  cfg.epsilon = epsilon;
  cfg.s = 0.9;
  cfg.flow.dt = 1e-3;
  cfg.flow.t_end = t_end;
  return cfg;
}

}  // namespace

TEST(HighLow, RoughDatumRefinement) {
  const double s = 0.8;
  std::vector<double> hs, h1;
  for (std::size_t n : {256u, 512u, 1024u}) {
    const auto& op = hyperbolic(n);
    const RadialField phi = make_rough_datum(op, s, 5, 1.0);
    hs.push_back(op.sobolev_norm(phi, s));
    h1.push_back(op.sobolev_norm(phi, 1.0));
  }
  const auto [lo, hi] = std::minmax_element(hs.begin(), hs.end());
  EXPECT_LE(*hi / *lo - 1.0, 0.10);
  EXPECT_GE(h1[1] / h1[0], 1.08);
  EXPECT_GE(h1[2] / h1[1], 1.08);
}

TEST(HighLow, RoughDatumEdgeCases) {
  const auto& op = hyperbolic();
  EXPECT_EQ(make_rough_datum(op, 0.9, 1, 0.0).norm(), 0.0);
  EXPECT_THROW(make_rough_datum(op, 0.5, 1), ConfigError);
  EXPECT_THROW(make_rough_datum(op, 1.0, 1), ConfigError);
  EXPECT_EQ(make_rough_datum(op, 0.9, 3), make_rough_datum(op, 0.9, 3));
  EXPECT_NE(make_rough_datum(op, 0.9, 3), make_rough_datum(op, 0.9, 4));
  const RadialField a = make_rough_datum(op, 0.9, 3, 1.0);
  const RadialField b = make_rough_datum(op, 0.9, 3, 2.5);
  EXPECT_LE((b - 2.5 * a).norm(), 1e-12 * b.norm());
}

TEST(HighLow, SplitIsExactAndScales) {
  const double s = 0.8;
  const auto& op = hyperbolic(512);
  const RadialField phi = make_rough_datum(op, s, 2, 1.0);
  const auto s0s = log_space(1e-3, 1e-1, 6);
  std::vector<double> eta_h1, psi_l2;
  for (double s0 : s0s) {
    const DatumSplit split = split_datum(op, phi, s0);
    EXPECT_LE((split.low + split.high - phi).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, phi.cwiseAbs().maxCoeff()));
    eta_h1.push_back(op.sobolev_norm(split.low, 1.0));
    psi_l2.push_back(op.grid().l2_norm(split.high));
  }
  EXPECT_NEAR(fit_power_law(s0s, eta_h1).slope, (s - 1.0) / 2.0, 0.1);
  EXPECT_NEAR(fit_power_law(s0s, psi_l2).slope, s / 2.0, 0.1);
  EXPECT_THROW(split_datum(op, phi, 0.0), DomainError);
}

TEST(HighLow, BudgetParameters) {
  const auto cubic = budget_parameters(0.9, 3, 1e-2);
  EXPECT_EQ(cubic.critical_exponent, 0.0);
  EXPECT_DOUBLE_EQ(cubic.threshold, 0.75);
  EXPECT_NEAR(cubic.increment_exponent, 0.10, 1e-12);
  for (double s : {0.8, 0.9, 1.0}) {
    const auto b = budget_parameters(s, 3, 0.05);
    EXPECT_NEAR(b.m_exponent, -s / 2.0 + 0.25, 1e-14);
    EXPECT_NEAR(b.m, std::pow(0.05, -s / 2.0 + 0.25), 1e-12);
    EXPECT_NEAR(b.increment_exponent, 1.5 * s - 1.25, 1e-14);
  }
  EXPECT_NEAR(increment_exponent(1.0, 3), 0.25, 1e-14);
  EXPECT_DOUBLE_EQ(regularity_threshold(4), 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(regularity_threshold(5), 9.0 / 10.0);
  EXPECT_DOUBLE_EQ(regularity_threshold(7), 15.0 / 16.0);
  EXPECT_DOUBLE_EQ(critical_exponent(5), 0.5);
  EXPECT_DOUBLE_EQ(critical_exponent(4), 1.0 / 3.0);
  EXPECT_THROW(budget_parameters(0.4, 5, 1e-2), DomainError);
  EXPECT_THROW(budget_parameters(0.0, 3, 1e-2), DomainError);
  EXPECT_THROW(budget_parameters(0.9, 3, 0.0), DomainError);
  EXPECT_THROW(budget_parameters(0.9, 2, 1e-2), ConfigError);
}

TEST(HighLow, LedgerStructure) {
  const auto& op = hyperbolic();
  const RadialField phi = make_rough_datum(op, 0.9, 1, 1.0);
  const HighLowConfig cfg = run_config(1e-2, 1e-2, 2.0);
  const HighLowLedger ledger = run_highlow(op, phi, cfg);
  ASSERT_GE(ledger.intervals.size(), 3u);
  EXPECT_EQ(ledger.intervals.front().a_start, 0.0);
  EXPECT_NEAR(ledger.intervals.back().a_end, 2.0, 1e-12);
  EXPECT_LE(ledger.u_mass_drift, 1e-10);
  // Largest trapezoid contribution of a single step bounds the overshoot.
  double max_step = 0;
  for (const auto& rec : ledger.intervals) max_step = std::max(max_step, rec.l4_budget / rec.steps);
  for (std::size_t i = 0; i < ledger.intervals.size(); ++i) {
    const auto& rec = ledger.intervals[i];
    EXPECT_EQ(rec.index, i);
    EXPECT_GT(rec.a_end, rec.a_start);
    if (i > 0) {
      EXPECT_EQ(rec.a_start, ledger.intervals[i - 1].a_end);
    }
    EXPECT_LE(rec.zeta2_start_l2, 1e-14 * op.grid().l2_norm(phi)) << "interval " << i;
    if (i + 1 < ledger.intervals.size()) {
      EXPECT_FALSE(rec.partial);
    } else {
      EXPECT_TRUE(rec.partial);
      EXPECT_LE(rec.l4_budget, cfg.epsilon + 2 * max_step);
    }
    EXPECT_GE(rec.zeta2_sup_h1, 0.0);
    EXPECT_GT(rec.weighted_sup_zeta1, 0.0);
    EXPECT_GT(rec.weighted_sup_psi, 0.0);
  }
  // Interval budgets sum to the whole spacetime L^4 integral, each close to epsilon.
  for (std::size_t i = 1; i + 1 < ledger.intervals.size(); ++i) {
    EXPECT_GE(ledger.intervals[i].l4_budget, cfg.epsilon - 2 * max_step);
    EXPECT_LE(ledger.intervals[i].l4_budget, cfg.epsilon + 2 * max_step);
  }
}

TEST(HighLow, EnergyIncrementsVanishWithoutHighFrequencies) {
  const auto& op = hyperbolic();
  const RadialField phi = gaussian(op.grid(), 1.0, 1.0);
  const HighLowLedger ledger = run_highlow(op, phi, run_config(1e-14, 5e-3, 1.0));
  ASSERT_GE(ledger.intervals.size(), 3u);
  EXPECT_LE(ledger.psi0_l2, 1e-9);
  for (const auto& rec : ledger.intervals) {
    EXPECT_LE(std::abs(rec.energy_increment), 1e-6 * ledger.datum_energy);
    EXPECT_LE(rec.zeta2_sup_l2, 1e-8);
  }
}

TEST(HighLow, IntervalCapRaisesWithPartialLedger) {
  const auto& op = hyperbolic();
  const RadialField phi = make_rough_datum(op, 0.9, 1, 1.0);
  HighLowConfig cfg = run_config(1e-2, 1e-3, 1.0);
  cfg.max_intervals = 2;
  try {
    run_highlow(op, phi, cfg);
    FAIL() << "expected RunError";
  } catch (const RunError& e) {
    EXPECT_EQ(e.partial().intervals.size(), 3u);
  }
  cfg.max_intervals = 0;
  EXPECT_THROW(run_highlow(op, phi, cfg), ConfigError);
  EXPECT_THROW(run_highlow(op, RadialField::Zero(8), run_config(1e-2, 1e-2, 0.1)), ConfigError);
  EXPECT_THROW(run_highlow(op, phi, run_config(1e-2, 0.0, 0.1)), ConfigError);
}

TEST(HighLow, NonFiniteDatumRaisesRunError) {
  const auto& op = hyperbolic();
  RadialField phi = gaussian(op.grid());
  phi[3] = std::complex<double>(INFINITY, 0);
  EXPECT_THROW(run_highlow(op, phi, run_config(1e-2, 1e-2, 0.01)), std::exception);
}

TEST(HighLow, ScalingStudy) {
  const auto& op = hyperbolic();
  const RadialField phi = make_rough_datum(op, 0.9, 1, 1.0);
  const auto s0s = log_space(std::pow(10.0, -1.5), 1e-3, 6);
  const ScalingReport report = increment_scaling_study(op, phi, s0s, run_config(1e-2, 1e-2, 5.0), 2);
  ASSERT_EQ(report.points.size(), 6u);
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    EXPECT_LT(report.points[i].s0, report.points[i - 1].s0);
    // zeta2 shrinks in H^1 as the split moves to higher frequencies.
    EXPECT_LT(report.points[i].zeta2_h1, report.points[i - 1].zeta2_h1);
  }
  EXPECT_NEAR(report.predicted_exponent, 0.10, 1e-12);
  EXPECT_GE(report.fitted_slope, report.predicted_exponent - 0.25);
  for (const auto& pt : report.points) {
    EXPECT_LE(pt.max_increment, report.fitted_constant * std::pow(pt.s0, report.predicted_exponent) * (1 + 1e-12));
    EXPECT_LE(pt.u_hs_max, report.hs_bound_constant * std::pow(pt.s0, 0.5 * 0.9 * (0.9 - 1)) * (1 + 1e-12));
  }
  EXPECT_GT(report.zeta2_h1_slope, 0.0);
  // Decay at least as fast as the stated upper bounds.
  EXPECT_GE(report.psi_sup_slope, 0.9 / 2 - 0.25 - 0.15);
  EXPECT_GE(report.zeta2_sup_slope, 0.9 / 2 - 0.25 - 0.15);
  EXPECT_NEAR(report.zeta1_sup_slope, (0.9 - 1) / 4, 0.15);

  // Thread count does not change the numbers.
  const ScalingReport serial = increment_scaling_study(op, phi, {0.1, 0.03, 0.01, 0.003, 0.001},
                                                       run_config(1e-2, 1e-2, 0.5), 1);
  const ScalingReport parallel = increment_scaling_study(op, phi, {0.1, 0.03, 0.01, 0.003, 0.001},
                                                         run_config(1e-2, 1e-2, 0.5), 3);
  for (std::size_t i = 0; i < serial.points.size(); ++i) {
    EXPECT_EQ(serial.points[i].max_increment, parallel.points[i].max_increment);
  }
}

TEST(HighLow, ScalingStudyErrors) {
  const auto& op = hyperbolic();
  const RadialField phi = make_rough_datum(op, 0.9, 1, 1.0);
  const HighLowConfig base = run_config(1e-2, 1e-2, 0.1);
  EXPECT_THROW(increment_scaling_study(op, phi, {0.1, 0.01, 0.001}, base), ConfigError);
  EXPECT_THROW(increment_scaling_study(op, phi, {0.03, 0.01, 0.003, 0.001}, base), ConfigError);
  const RadialField zero = RadialField::Zero(op.size());
  EXPECT_THROW(increment_scaling_study(op, zero, {0.1, 0.03, 0.01, 0.001}, base), StudyError);
}
