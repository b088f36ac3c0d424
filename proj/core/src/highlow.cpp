#include "hyplab/highlow.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "hyplab/errors.hpp"
#include "hyplab/fit.hpp"
#include "hyplab/heat_lp.hpp"

namespace hyplab {

namespace {

double kinetic(const Eigen::VectorXd& lambda, const Eigen::VectorXcd& c) {
  return 0.5 * (lambda.array() * c.array().abs2()).sum();
}

double quartic_density(const RadialGrid& grid, const Eigen::Ref<const RadialField>& f) {
  return grid.quad_weights().dot(f.cwiseAbs2().cwiseAbs2());
}

double weighted_sup_ref(const Eigen::VectorXd& sqrt_w, const Eigen::Ref<const RadialField>& f) {
  return (sqrt_w.array() * f.array().abs()).maxCoeff();
}

bool all_finite(const Eigen::MatrixXcd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
      const double a = std::abs(m(k, j));
      if (!std::isfinite(a) || a > 1e150) return false;
    }
  }
  return true;
}

double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0 && std::isfinite(y[i])) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return fit_power_law(xs, ys).slope;
}

}  // namespace

RadialField make_rough_datum(const SpectralOperator& op, double s, std::uint64_t seed, double amplitude) {
  if (!(s > 0.5 && s < 1.0)) throw ConfigError("rough datum: s must lie in (0.5, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Eigen::VectorXd& lam = op.eigenvalues();
  Eigen::VectorXcd c(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double mode = static_cast<double>(k + 1);
    const double size = amplitude * std::pow(1.0 + lam[k], -0.5 * s) * std::pow(mode, -0.5 - rough_datum_delta);
    c[k] = std::polar(size, angle(rng));
  }
  return op.synthesize(c);
}

DatumSplit split_datum(const SpectralOperator& op, const RadialField& phi, double s0) {
  if (!(s0 > 0.0)) throw DomainError("split_datum: s0 must be > 0");
  DatumSplit out;
  out.low = heat(op, s0, phi);
  out.high = phi - out.low;
  return out;
}

double critical_exponent(int p) {
  if (p < 3) throw ConfigError("nonlinearity order p must be >= 3");
  return 1.0 - 2.0 / static_cast<double>(p - 1);
}

double increment_exponent(double s, int p) {
  if (p < 3) throw ConfigError("nonlinearity order p must be >= 3");
  return (p + 3) / 4.0 * s - (p + 2) / 4.0;
}

double regularity_threshold(int p) {
  if (p < 3) throw ConfigError("nonlinearity order p must be >= 3");
  return (3.0 * p - 6.0) / (3.0 * p - 5.0);
}

BudgetParameters budget_parameters(double s, int p, double s0) {
  BudgetParameters b;
  b.critical_exponent = critical_exponent(p);
  if (!(s > b.critical_exponent)) throw DomainError("budget_parameters: s must exceed s_c");
  if (s > 1.0) throw DomainError("budget_parameters: s must be <= 1");
  if (!(s0 > 0.0)) throw DomainError("budget_parameters: s0 must be > 0");
  b.m_exponent = 0.5 * ((1.0 - s) / (1.0 - b.critical_exponent) - 0.5);
  b.m = std::pow(s0, b.m_exponent);
  b.increment_exponent = increment_exponent(s, p);
  b.threshold = regularity_threshold(p);
  return b;
}

void HighLowConfig::validate() const {
  flow.validate();
  if (!(s0 > 0.0)) throw DomainError("highlow: s0 must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("highlow: epsilon must be > 0");
  if (!(s > 0.0 && s <= 1.0)) throw ConfigError("highlow: s must lie in (0, 1]");
  if (max_intervals < 1) throw ConfigError("highlow: max_intervals must be >= 1");
}

double HighLowLedger::increment_floor() const {
  double scale = std::abs(datum_energy);
  for (const auto& rec : intervals) scale = std::max(scale, std::abs(rec.energy_start));
  return 100.0 * std::numeric_limits<double>::epsilon() * scale;
}

double HighLowLedger::max_positive_increment() const {
  const double floor = increment_floor();
  double best = 0.0;
  for (const auto& rec : intervals) {
    if (rec.energy_increment > floor) best = std::max(best, rec.energy_increment);
  }
  return best;
}

double HighLowLedger::max_weighted_sup_psi() const {
  double m = 0.0;
  for (const auto& rec : intervals) m = std::max(m, rec.weighted_sup_psi);
  return m;
}

double HighLowLedger::max_weighted_sup_zeta1() const {
  double m = 0.0;
  for (const auto& rec : intervals) m = std::max(m, rec.weighted_sup_zeta1);
  return m;
}

double HighLowLedger::max_weighted_sup_zeta2() const {
  double m = 0.0;
  for (const auto& rec : intervals) m = std::max(m, rec.weighted_sup_zeta2);
  return m;
}

double HighLowLedger::max_zeta2_h1() const {
  double m = 0.0;
  for (const auto& rec : intervals) m = std::max(m, rec.zeta2_sup_h1);
  return m;
}

HighLowLedger run_highlow(const SpectralOperator& op, const RadialField& phi, const HighLowConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(phi.size()) != op.size()) {
    throw ConfigError("run_highlow: datum does not match the operator grid");
  }
  const RadialGrid& grid = op.grid();
  const Eigen::VectorXd& lam = op.eigenvalues();
  const Eigen::Index n = lam.size();
  const int p = cfg.flow.p;
  const double dt = cfg.flow.dt;
  const std::size_t steps = cfg.flow.steps();

  Eigen::VectorXd sqrt_w(n);
  for (Eigen::Index k = 0; k < n; ++k) sqrt_w[k] = std::sqrt(grid.backend().volume_weight(grid.nodes()[k]));

  const DatumSplit split = split_datum(op, phi, cfg.s0);
  HighLowLedger ledger;
  ledger.config = cfg;
  ledger.under_resolved = cfg.flow.resolution_number(op) > std::numbers::pi;
  ledger.datum_energy = energy(op, phi, p);
  ledger.low_energy = energy(op, split.low, p);
  ledger.psi0_l2 = grid.l2_norm(split.high);
  ledger.eta0_h1 = op.sobolev_norm(split.low, 1.0);
  const double mass0 = mass(grid, phi);

  const Eigen::VectorXcd half = linear_phase(op, 0.5 * dt);
  const Eigen::VectorXcd psi_coeff0 = op.analyze(split.high);

  // columns: u, zeta1, psi
  Eigen::MatrixXcd coeff(n, 3);
  coeff.col(0) = op.analyze(phi);
  coeff.col(2) = psi_coeff0;
  coeff.col(1) = coeff.col(0) - coeff.col(2);
  Eigen::MatrixXcd fields(n, 3);
  fields.col(0) = phi;
  fields.col(1) = split.low;
  fields.col(2) = split.high;

  auto zeta_energy = [&]() {
    const Eigen::VectorXcd c = coeff.col(0) - coeff.col(2);
    const RadialField f = fields.col(0) - fields.col(2);
    return kinetic(lam, c) + potential_energy(grid, f, p);
  };
  auto zeta1_energy = [&]() {
    return kinetic(lam, coeff.col(1)) + potential_energy(grid, fields.col(1), p);
  };

  struct Densities {
    double u = 0.0, zeta1 = 0.0, zeta2 = 0.0, psi = 0.0;
  };
  RadialField zeta2(n);
  auto densities = [&]() {
    zeta2 = fields.col(0) - fields.col(1) - fields.col(2);
    return Densities{quartic_density(grid, fields.col(0)), quartic_density(grid, fields.col(1)),
                     quartic_density(grid, zeta2), quartic_density(grid, fields.col(2))};
  };

  IntervalRecord current;
  double zeta1_start_energy = 0.0;
  double zeta2_l4_4 = 0.0;
  double psi_l4_4 = 0.0;
  auto observe = [&]() {
    const Eigen::VectorXcd c2 = coeff.col(0) - coeff.col(1) - coeff.col(2);
    current.zeta2_sup_l2 = std::max(current.zeta2_sup_l2, grid.l2_norm(zeta2));
    current.zeta2_sup_h1 = std::max(current.zeta2_sup_h1, op.sobolev_norm_from_coefficients(c2, 1.0));
    current.weighted_sup_psi = std::max(current.weighted_sup_psi, weighted_sup_ref(sqrt_w, fields.col(2)));
    current.weighted_sup_zeta1 = std::max(current.weighted_sup_zeta1, weighted_sup_ref(sqrt_w, fields.col(1)));
    current.weighted_sup_zeta2 = std::max(current.weighted_sup_zeta2, weighted_sup_ref(sqrt_w, zeta2));
  };
  auto open_interval = [&](double t) {
    current = IntervalRecord{};
    current.index = ledger.intervals.size();
    current.a_start = t;
    current.energy_start = zeta_energy();
    zeta1_start_energy = zeta1_energy();
    current.u_hs_start = op.sobolev_norm_from_coefficients(coeff.col(0), cfg.s);
    ledger.u_hs_max = std::max(ledger.u_hs_max, current.u_hs_start);
    zeta2_l4_4 = 0.0;
    psi_l4_4 = 0.0;
    zeta2 = fields.col(0) - fields.col(1) - fields.col(2);
    current.zeta2_start_l2 = grid.l2_norm(zeta2);
    observe();
  };
  auto close_interval = [&](double t, bool partial) {
    current.a_end = t;
    current.partial = partial;
    current.energy_increment = zeta_energy() - current.energy_start;
    current.zeta1_energy_drift = zeta1_energy() - zeta1_start_energy;
    current.zeta2_l4 = std::pow(zeta2_l4_4, 0.25);
    current.psi_l4 = std::pow(psi_l4_4, 0.25);
    ledger.intervals.push_back(current);
  };

  open_interval(0.0);
  Densities prev = densities();
  double l4_cum = 0.0;
  double next_threshold = cfg.epsilon;

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    Eigen::MatrixXcd flows = coeff.leftCols(2);
    strang_step(op, half, flows, dt, p);
    coeff.leftCols(2) = flows;
    coeff.col(2) = psi_coeff0.cwiseProduct(linear_phase(op, t));
    fields = op.synthesize_columns(coeff);
    if (!all_finite(fields)) {
      std::ostringstream msg;
      msg << "high-low run produced a non-finite field at t = " << t << " (step " << step << ")";
      throw RunError(msg.str(), std::move(ledger));
    }

    const Densities next = densities();
    const double half_dt = 0.5 * dt;
    l4_cum += half_dt * (prev.u + next.u);
    current.l4_budget += half_dt * (prev.u + next.u);
    current.zeta1_l4_4 += half_dt * (prev.zeta1 + next.zeta1);
    zeta2_l4_4 += half_dt * (prev.zeta2 + next.zeta2);
    psi_l4_4 += half_dt * (prev.psi + next.psi);
    ++current.steps;
    observe();
    prev = next;

    if (l4_cum >= next_threshold) {
      close_interval(t, false);
      next_threshold = (std::floor(l4_cum / cfg.epsilon) + 1.0) * cfg.epsilon;
      if (ledger.intervals.size() > cfg.max_intervals) {
        std::ostringstream msg;
        msg << "interval count exceeded the cap of " << cfg.max_intervals << " at t = " << t;
        throw RunError(msg.str(), std::move(ledger));
      }
      // re-decomposition: zeta1 restarts from zeta, zeta2 from zero
      coeff.col(1) = coeff.col(0) - coeff.col(2);
      fields.col(1) = fields.col(0) - fields.col(2);
      if (step < steps) {
        open_interval(t);
        prev = densities();
      }
    } else if (step == steps) {
      close_interval(t, true);
    }
  }
  if (steps == 0) close_interval(0.0, true);

  ledger.u_hs_max = std::max(ledger.u_hs_max, op.sobolev_norm_from_coefficients(coeff.col(0), cfg.s));
  ledger.u_mass_drift = mass0 > 0.0 ? std::abs(mass(grid, fields.col(0)) - mass0) / mass0 : 0.0;
  return ledger;
}

ScalingReport increment_scaling_study(const SpectralOperator& op, const RadialField& phi,
                                      const std::vector<double>& s0_list, const HighLowConfig& base,
                                      unsigned jobs) {
  if (s0_list.size() < 4) throw ConfigError("scaling study needs at least 4 values of s0");
  for (double s0 : s0_list) {
    if (!(s0 > 0.0)) throw DomainError("scaling study: every s0 must be > 0");
  }
  const auto [lo, hi] = std::minmax_element(s0_list.begin(), s0_list.end());
  if (std::log10(*hi / *lo) < 1.5 - 1e-9) {
    throw ConfigError("scaling study: s0 values must span at least 1.5 decades");
  }
  base.validate();

  std::vector<double> sorted = s0_list;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t m = sorted.size();
  std::vector<ScalingPoint> points(m);
  std::vector<std::exception_ptr> failures(m);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < m; i += stride) {
      try {
        HighLowConfig cfg = base;
        cfg.s0 = sorted[i];
        const HighLowLedger ledger = run_highlow(op, phi, cfg);
        ScalingPoint& pt = points[i];
        pt.s0 = sorted[i];
        pt.max_increment = ledger.max_positive_increment();
        pt.usable = pt.max_increment > 0.0;
        pt.interval_count = ledger.intervals.size();
        pt.u_hs_max = ledger.u_hs_max;
        pt.zeta2_h1 = ledger.max_zeta2_h1();
        pt.weighted_sup_psi = ledger.max_weighted_sup_psi();
        pt.weighted_sup_zeta1 = ledger.max_weighted_sup_zeta1();
        pt.weighted_sup_zeta2 = ledger.max_weighted_sup_zeta2();
        pt.eta0_h1 = ledger.eta0_h1;
        pt.psi0_l2 = ledger.psi0_l2;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1u, static_cast<unsigned>(m));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, jobs);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  ScalingReport report;
  report.s = base.s;
  report.p = base.flow.p;
  report.points = points;
  report.predicted_exponent = increment_exponent(base.s, base.flow.p);

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : points) {
    if (!pt.usable) continue;
    xs.push_back(pt.s0);
    ys.push_back(pt.max_increment);
    report.fitted_constant =
        std::max(report.fitted_constant, pt.max_increment / std::pow(pt.s0, report.predicted_exponent));
  }
  if (xs.size() < 4) {
    std::ostringstream msg;
    msg << "only " << xs.size() << " sweep points have energy increments above the roundoff floor; "
        << "increase the datum amplitude or t_end";
    throw StudyError(msg.str());
  }
  const LineFit fit = fit_power_law(xs, ys);
  report.fitted_slope = fit.slope;
  report.fitted_intercept = fit.intercept;

  report.onset_index = m - 1;
  while (report.onset_index > 0 &&
         points[report.onset_index].max_increment <= points[report.onset_index - 1].max_increment) {
    --report.onset_index;
  }
  report.onset_s0 = points[report.onset_index].s0;

  const double hs_exponent = 0.5 * base.s * (base.s - 1.0);
  std::vector<double> all_s0;
  std::vector<double> z2;
  std::vector<double> sp;
  std::vector<double> s1;
  std::vector<double> s2;
  for (const auto& pt : points) {
    report.hs_bound_constant = std::max(report.hs_bound_constant, pt.u_hs_max / std::pow(pt.s0, hs_exponent));
    all_s0.push_back(pt.s0);
    z2.push_back(pt.zeta2_h1);
    sp.push_back(pt.weighted_sup_psi);
    s1.push_back(pt.weighted_sup_zeta1);
    s2.push_back(pt.weighted_sup_zeta2);
  }
  report.zeta2_h1_slope = slope_or_nan(all_s0, z2);
  report.psi_sup_slope = slope_or_nan(all_s0, sp);
  report.zeta1_sup_slope = slope_or_nan(all_s0, s1);
  report.zeta2_sup_slope = slope_or_nan(all_s0, s2);
  return report;
}

}  // namespace hyplab
