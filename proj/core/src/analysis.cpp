#include "hyplab/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();

double inverse_exponent(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

std::size_t snapshot_at(const Trajectory& traj, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    if (std::abs(traj.snapshots[j].t - t) <= tol) return j;
  }
  throw DomainError("time " + std::to_string(t) + " is not a recorded snapshot of the trajectory");
}

}  // namespace

bool is_admissible(double q, double r, int d) {
  if (!(q >= 2.0) || !(r >= 2.0)) throw ConfigError("is_admissible: exponents must lie in [2, inf]");
  const double iq = inverse_exponent(q);
  const double ir = inverse_exponent(r);
  constexpr double tol = 1e-12;
  if (iq == 0.0 && std::abs(ir - 0.5) <= tol) return true;
  if (!(iq > 0.0 && iq <= 0.5 + tol)) return false;
  if (!(ir > 0.0 && ir < 0.5 - tol)) return false;
  return 2.0 * iq + d * ir >= 0.5 * d - tol;
}

double spacetime_norm(const RadialGrid& grid, const Trajectory& traj, double q, double r) {
  if (traj.snapshots.empty()) throw ConfigError("spacetime_norm: empty trajectory");
  std::vector<double> spatial;
  spatial.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) spatial.push_back(grid.lp_norm(snap.field, r));
  if (std::isinf(q)) return *std::max_element(spatial.begin(), spatial.end());
  double acc = 0.0;
  for (std::size_t j = 1; j < spatial.size(); ++j) {
    const double tau = traj.snapshots[j].t - traj.snapshots[j - 1].t;
    acc += 0.5 * tau * (std::pow(spatial[j - 1], q) + std::pow(spatial[j], q));
  }
  return std::pow(acc, 1.0 / q);
}

double morawetz_action(const GeometryBackend& backend, const RadialGrid& grid, const RadialField& f) {
  const RadialField grad = face_gradient(grid, f);
  const RadialField avg = face_average(grid, f);
  const Eigen::VectorXd& wf = grid.face_weights();
  const double h = grid.spacing();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double face = (static_cast<double>(k) + 1.5) * h;
    acc += h * wf[k] * backend.morawetz_weight_gradient(face) * (std::conj(avg[k]) * grad[k]).imag();
  }
  return 2.0 * acc;
}

double morawetz_action(const SpectralOperator& op, const RadialField& f) {
  return morawetz_action(op.grid().backend(), op.grid(), f);
}

Eigen::VectorXd gradient_magnitude(const RadialGrid& grid, const RadialField& f) {
  const RadialField grad = face_gradient(grid, f);
  Eigen::VectorXd out(f.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const std::complex<double> left = k == 0 ? std::complex<double>{} : grad[k - 1];
    out[k] = std::abs(0.5 * (left + grad[k]));
  }
  return out;
}

InequalityReport make_report(std::string name, std::vector<double> lhs, std::vector<double> rhs, double cap) {
  if (lhs.size() != rhs.size()) throw ConfigError("make_report: lhs and rhs differ in length");
  InequalityReport rep;
  rep.name = std::move(name);
  rep.cap = cap;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i] == 0.0 && rhs[i] == 0.0) continue;
    ++rep.samples;
    rep.constant = std::max(rep.constant, rhs[i] > 0.0 ? lhs[i] / rhs[i] : kInf);
  }
  rep.lhs = std::move(lhs);
  rep.rhs = std::move(rhs);
  rep.pass = rep.valid && rep.constant <= cap;
  return rep;
}

InequalityReport check_morawetz_bound(const SpectralOperator& op, const std::vector<RadialField>& samples,
                                      double cap) {
  std::vector<double> lhs;
  std::vector<double> rhs;
  for (const auto& f : samples) {
    lhs.push_back(std::abs(morawetz_action(op, f)));
    rhs.push_back(op.grid().l2_norm(f) * op.sobolev_norm(f, 1.0));
  }
  return make_report("morawetz_action_bound", std::move(lhs), std::move(rhs), cap);
}

RadialField cubic_difference(const RadialField& u, const RadialField& zeta) {
  return power_nonlinearity(u, 3) - power_nonlinearity(zeta, 3);
}

CubicExpansion cubic_expansion(const RadialField& psi, const RadialField& zeta) {
  CubicExpansion e;
  const Eigen::ArrayXcd a = psi.array();
  const Eigen::ArrayXcd b = zeta.array();
  e.cubic = (a.abs2() * a).matrix();
  e.quadratic = (a.square() * b.conjugate() + 2.0 * a.abs2() * b).matrix();
  e.linear = (b.square() * a.conjugate() + 2.0 * b.abs2() * a).matrix();
  return e;
}

DuhamelResidual duhamel_residual(const SpectralOperator& op, const Trajectory& u,
                                 const std::vector<RadialField>& forcing) {
  const auto& snaps = u.snapshots;
  if (!forcing.empty() && forcing.size() != snaps.size()) {
    throw ConfigError("duhamel_residual: forcing must be empty or aligned with the snapshots");
  }
  const int p = u.config.p;
  auto source = [&](std::size_t j) {
    RadialField g = u.config.self_interaction ? power_nonlinearity(snaps[j].field, p)
                                              : RadialField::Zero(snaps[j].field.size());
    if (!forcing.empty()) g += forcing[j];
    return g;
  };

  std::vector<RadialField> sources;
  double g_sup = 0.0;
  for (std::size_t j = 0; j < snaps.size(); ++j) {
    sources.push_back(source(j));
    g_sup = std::max(g_sup, op.grid().l2_norm(sources.back()));
  }

  DuhamelResidual out;
  for (std::size_t j = 0; j + 1 < snaps.size(); ++j) {
    const double tau = snaps[j + 1].t - snaps[j].t;
    const RadialField pushed =
        evolve_linear(op, RadialField(snaps[j].field - (0.5 * tau) * kI * sources[j]), tau);
    const RadialField residual = snaps[j + 1].field - pushed + (0.5 * tau) * kI * sources[j + 1];
    const double scale = g_sup > 0.0 ? tau * g_sup : 1.0;
    out.per_step.push_back(op.grid().l2_norm(residual) / scale);
    out.max_relative = std::max(out.max_relative, out.per_step.back());
  }
  return out;
}

InequalityReport check_modified_morawetz(const SpectralOperator& op, const Trajectory& u,
                                         const std::vector<RadialField>& forcing, double cap,
                                         double residual_tolerance) {
  const auto& snaps = u.snapshots;
  if (snaps.size() < 2) throw ConfigError("check_modified_morawetz: need at least two snapshots");
  if (!forcing.empty() && forcing.size() != snaps.size()) {
    throw ConfigError("check_modified_morawetz: forcing must be empty or aligned with the snapshots");
  }
  const RadialGrid& grid = op.grid();
  const DuhamelResidual residual = duhamel_residual(op, u, forcing);

  std::vector<double> n_u;
  std::vector<double> n_grad;
  for (std::size_t j = 0; j < snaps.size(); ++j) {
    if (forcing.empty()) {
      n_u.push_back(0.0);
      n_grad.push_back(0.0);
      continue;
    }
    const Eigen::VectorXd nf = forcing[j].cwiseAbs();
    n_u.push_back(grid.integrate(nf.cwiseProduct(snaps[j].field.cwiseAbs())));
    n_grad.push_back(grid.integrate(nf.cwiseProduct(gradient_magnitude(grid, snaps[j].field))));
  }

  std::vector<double> lhs;
  std::vector<double> rhs;
  double sup_l2 = std::sqrt(snaps[0].mass);
  double sup_h1 = snaps[0].h1;
  double int_n_u = 0.0;
  double int_n_grad = 0.0;
  for (std::size_t j = 1; j < snaps.size(); ++j) {
    const double tau = snaps[j].t - snaps[j - 1].t;
    sup_l2 = std::max(sup_l2, std::sqrt(snaps[j].mass));
    sup_h1 = std::max(sup_h1, snaps[j].h1);
    int_n_u += 0.5 * tau * (n_u[j - 1] + n_u[j]);
    int_n_grad += 0.5 * tau * (n_grad[j - 1] + n_grad[j]);
    lhs.push_back(snaps[j].l4_cum);
    rhs.push_back(sup_l2 * sup_h1 + int_n_u + int_n_grad);
  }
  InequalityReport rep = make_report("modified_morawetz", std::move(lhs), std::move(rhs), cap);
  if (residual.max_relative > residual_tolerance) {
    rep.valid = false;
    rep.pass = false;
    rep.note = "Duhamel residual " + std::to_string(residual.max_relative) + " exceeds tolerance " +
               std::to_string(residual_tolerance);
  } else {
    rep.note = "Duhamel residual " + std::to_string(residual.max_relative);
  }
  return rep;
}

std::string_view to_string(WeightConvention w) {
  return w == WeightConvention::Polynomial ? "polynomial" : "cosh";
}

WeightConvention parse_weight_convention(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "polynomial" || lower == "japanese") return WeightConvention::Polynomial;
  if (lower == "cosh" || lower == "sinh") return WeightConvention::Cosh;
  throw ConfigError("unknown weight convention '" + std::string(name) + "' (expected polynomial or cosh)");
}

LocalSmoothing::LocalSmoothing(const SpectralOperator& op, double eps, WeightConvention weight)
    : op_(&op), eps_(eps), weight_(weight) {
  if (!(eps > 0.0)) throw ConfigError("local smoothing: eps must be > 0");
  const Eigen::VectorXd& r = op.grid().nodes();
  Eigen::VectorXd rho2(r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) rho2[k] = weight_squared(r[k]);
  const Eigen::MatrixXd& v = op.symmetric_eigenvectors();
  gram_.noalias() = v.transpose() * rho2.asDiagonal() * v;
}

double LocalSmoothing::weight_squared(double r) const {
  const double bracket = weight_ == WeightConvention::Polynomial ? std::sqrt(1.0 + r * r) : std::cosh(r);
  return std::pow(bracket, -1.0 - 2.0 * eps_);
}

double LocalSmoothing::lhs(const RadialField& f, double t_end) const {
  if (!(t_end >= 0.0)) throw DomainError("local smoothing: t_end must be >= 0");
  const Eigen::VectorXd& lam = op_->eigenvalues();
  Eigen::VectorXcd d = op_->analyze(f);
  for (Eigen::Index k = 0; k < d.size(); ++k) d[k] *= std::pow(lam[k], 0.25);

  double acc = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    acc += t_end * std::norm(d[k]) * gram_(k, k);
    for (Eigen::Index l = k + 1; l < d.size(); ++l) {
      const double omega = lam[k] - lam[l];
      std::complex<double> window;
      if (std::abs(omega * t_end) < 1e-8) {
        window = t_end;
      } else {
        window = (1.0 - std::exp(-kI * (omega * t_end))) / (kI * omega);
      }
      acc += 2.0 * (d[k] * std::conj(d[l]) * gram_(k, l) * window).real();
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

double LocalSmoothing::ratio(const RadialField& f, double t_end) const {
  const double norm = op_->grid().l2_norm(f);
  return norm > 0.0 ? lhs(f, t_end) / norm : 0.0;
}

LocalSmoothingReport check_local_smoothing(const SpectralOperator& op, const std::vector<RadialField>& samples,
                                           const std::vector<double>& horizons, double eps,
                                           WeightConvention weight, double cap) {
  if (horizons.empty()) throw ConfigError("check_local_smoothing: need at least one horizon");
  const LocalSmoothing ls(op, eps, weight);
  LocalSmoothingReport out;
  out.horizons = horizons;
  std::vector<double> lhs;
  std::vector<double> rhs;
  for (const auto& f : samples) {
    std::vector<double> row;
    for (double t : horizons) row.push_back(ls.ratio(f, t));
    if (horizons.size() >= 2 && row[row.size() - 2] > 0.0) {
      out.max_last_growth = std::max(out.max_last_growth, row.back() / row[row.size() - 2]);
    }
    lhs.push_back(ls.lhs(f, horizons.back()));
    rhs.push_back(op.grid().l2_norm(f));
    out.ratios.push_back(std::move(row));
  }
  out.saturated = out.max_last_growth <= 1.05;
  out.report = make_report("local_smoothing", std::move(lhs), std::move(rhs), cap);
  out.report.note = std::string("weight ") + std::string(to_string(weight)) +
                    (out.saturated ? ", saturated" : ", not saturated on the bounded domain");
  return out;
}

double radial_sobolev_alpha_rhs(const SpectralOperator& op, const RadialField& f, double alpha) {
  if (!(alpha > 0.25 && alpha < 1.0)) throw ConfigError("radial Sobolev: alpha must lie in (1/4, 1)");
  const double theta = 1.0 / (4.0 * alpha);
  return std::pow(op.grid().l2_norm(f), 1.0 - theta) * std::pow(op.fractional_norm(f, alpha), theta);
}

bool RadialSobolevReport::pass() const {
  bool ok = weighted.pass && gagliardo_nirenberg.pass;
  for (const auto& r : alpha_variants) ok = ok && r.pass;
  return ok;
}

RadialSobolevReport check_radial_sobolev(const SpectralOperator& op, const std::vector<RadialField>& samples,
                                         const std::vector<double>& alphas, double cap) {
  const RadialGrid& grid = op.grid();
  RadialSobolevReport out;
  out.alphas = alphas;

  std::vector<double> lhs_w;
  std::vector<double> rhs_w;
  std::vector<double> lhs_gn;
  std::vector<double> rhs_gn;
  std::vector<std::vector<double>> rhs_a(alphas.size());
  for (const auto& f : samples) {
    lhs_w.push_back(weighted_sup(grid, f));
    rhs_w.push_back(std::sqrt(grid.l2_norm(f) * op.gradient_norm(f)));
    for (std::size_t a = 0; a < alphas.size(); ++a) rhs_a[a].push_back(radial_sobolev_alpha_rhs(op, f, alphas[a]));
    lhs_gn.push_back(f.cwiseAbs().maxCoeff());
    const RadialField grad = gradient_magnitude(grid, f).cast<std::complex<double>>();
    rhs_gn.push_back(std::sqrt(grid.lp_norm(f, 4.0) * grid.lp_norm(grad, 4.0)));
  }
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    out.alpha_variants.push_back(
        make_report("radial_sobolev_alpha_" + std::to_string(alphas[a]), lhs_w, std::move(rhs_a[a]), cap));
  }
  out.weighted = make_report("radial_sobolev", std::move(lhs_w), std::move(rhs_w), cap);
  out.gagliardo_nirenberg = make_report("gagliardo_nirenberg", std::move(lhs_gn), std::move(rhs_gn), cap);
  return out;
}

bool ScatteringReport::decreasing() const {
  for (std::size_t i = 1; i < differences.size(); ++i) {
    if (!(differences[i] < differences[i - 1])) return false;
  }
  return true;
}

ScatteringReport scattering_diagnostic(const SpectralOperator& op, const Trajectory& u, double s,
                                       const std::vector<double>& times) {
  if (times.size() < 3) throw ConfigError("scattering_diagnostic: need at least three times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("scattering_diagnostic: times must increase");
  }
  const Eigen::VectorXd& lam = op.eigenvalues();
  ScatteringReport out;
  out.times = times;
  out.s = s;
  std::vector<Eigen::VectorXcd> profiles;
  for (double t : times) {
    if (t > u.back().t + 1e-9 * std::max(1.0, t)) throw DomainError("scattering_diagnostic: time beyond trajectory");
    const std::size_t j = snapshot_at(u, t);
    Eigen::VectorXcd c = op.analyze(u.snapshots[j].field);
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(kI * (u.snapshots[j].t * lam[k]));
    profiles.push_back(std::move(c));
  }
  for (std::size_t i = 1; i < profiles.size(); ++i) {
    out.differences.push_back(op.sobolev_norm_from_coefficients(profiles[i] - profiles[i - 1], s));
  }
  for (std::size_t i = 1; i < out.differences.size(); ++i) {
    out.decrement_ratios.push_back(out.differences[i - 1] > 0.0 ? out.differences[i] / out.differences[i - 1]
                                                                : 0.0);
  }
  return out;
}

}  // namespace hyplab
