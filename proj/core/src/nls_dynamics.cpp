#include "hyplab/nls_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "binary_io.hpp"
#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kOverflow = 1e150;

bool finite_and_bounded(const RadialField& f) {
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double a = std::abs(f[k]);
    if (!std::isfinite(a) || a > kOverflow) return false;
  }
  return true;
}

double kinetic_from_coefficients(const Eigen::VectorXd& lambda, const Eigen::VectorXcd& c) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) acc += lambda[k] * std::norm(c[k]);
  return 0.5 * acc;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("flow: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("flow: t_end must be >= 0");
  if (p < 3) throw ConfigError("flow: nonlinearity order p must be >= 3");
  if (record_every < 1) throw ConfigError("flow: record_every must be >= 1");
}

std::size_t FlowConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

double FlowConfig::resolution_number(const SpectralOperator& op) const { return dt * op.lambda_max(); }

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.t);
  return t;
}

double mass(const RadialGrid& grid, const RadialField& f) {
  return grid.quad_weights().dot(f.cwiseAbs2());
}

double l4_density(const RadialGrid& grid, const RadialField& f) {
  return grid.quad_weights().dot(f.cwiseAbs2().cwiseAbs2());
}

double potential_energy(const RadialGrid& grid, const RadialField& f, int p) {
  const double q = static_cast<double>(p + 1);
  double acc = 0.0;
  const auto& w = grid.quad_weights();
  for (Eigen::Index k = 0; k < f.size(); ++k) acc += w[k] * std::pow(std::abs(f[k]), q);
  return acc / q;
}

double energy(const SpectralOperator& op, const RadialField& f, int p) {
  return kinetic_from_coefficients(op.eigenvalues(), op.analyze(f)) +
         potential_energy(op.grid(), f, p);
}

RadialField power_nonlinearity(const RadialField& f, int p) {
  RadialField out(f.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double a = std::abs(f[k]);
    out[k] = (p == 3 ? a * a : std::pow(a, p - 1)) * f[k];
  }
  return out;
}

RadialField evolve_linear(const SpectralOperator& op, const RadialField& f, double t) {
  if (t == 0.0) return f;
  return op.apply([t](double lam) { return std::exp(-kI * (t * lam)); }, f);
}

Eigen::VectorXcd linear_phase(const SpectralOperator& op, double tau) {
  const Eigen::VectorXd& lam = op.eigenvalues();
  Eigen::VectorXcd out(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) out[k] = std::exp(-kI * (tau * lam[k]));
  return out;
}

void strang_step(const SpectralOperator& op, const Eigen::VectorXcd& half_phase,
                 Eigen::MatrixXcd& coefficients, double dt, int p) {
  coefficients = half_phase.asDiagonal() * coefficients;
  Eigen::MatrixXcd x = op.synthesize_columns(coefficients);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      const double a = std::abs(x(k, j));
      const double rate = p == 3 ? a * a : std::pow(a, p - 1);
      x(k, j) *= std::exp(-kI * (dt * rate));
    }
  }
  coefficients = half_phase.asDiagonal() * op.analyze_columns(x);
}

Trajectory evolve_nls(const SpectralOperator& op, const RadialField& f0, const FlowConfig& cfg,
                      const Forcing& forcing) {
  cfg.validate();
  if (static_cast<std::size_t>(f0.size()) != op.size()) {
    throw ConfigError("evolve_nls: initial field does not match the operator grid");
  }
  const RadialGrid& grid = op.grid();
  const Eigen::VectorXd& lam = op.eigenvalues();
  const double dt = cfg.dt;
  const std::size_t steps = cfg.steps();

  const Eigen::VectorXcd half = linear_phase(op, 0.5 * dt);

  Trajectory traj;
  traj.config = cfg;
  traj.under_resolved = cfg.resolution_number(op) > std::numbers::pi;

  Eigen::VectorXcd c = op.analyze(f0);
  RadialField u = f0;
  double l4_cum = 0.0;
  double density = l4_density(grid, u);

  auto record = [&](double t) {
    TrajectorySnapshot snap;
    snap.t = t;
    snap.field = u;
    snap.mass = mass(grid, u);
    snap.energy = kinetic_from_coefficients(lam, c) + potential_energy(grid, u, cfg.p);
    snap.l4_cum = l4_cum;
    snap.h1 = op.sobolev_norm_from_coefficients(c, 1.0);
    snap.hs = op.sobolev_norm_from_coefficients(c, cfg.sobolev_index);
    traj.snapshots.push_back(std::move(snap));
  };
  record(0.0);

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t0 = static_cast<double>(step - 1) * dt;
    const double t_mid = t0 + 0.5 * dt;

    c.array() *= half.array();
    RadialField x = op.synthesize(c);
    if (forcing) {
      const RadialField mid = x - (0.25 * dt) * kI * forcing(t_mid, x);
      x -= (0.5 * dt) * kI * forcing(t_mid, mid);
    }
    if (cfg.self_interaction) {
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double a = std::abs(x[k]);
        const double rate = cfg.p == 3 ? a * a : std::pow(a, cfg.p - 1);
        x[k] *= std::exp(-kI * (dt * rate));
      }
    }
    if (forcing) {
      const RadialField mid = x - (0.25 * dt) * kI * forcing(t_mid, x);
      x -= (0.5 * dt) * kI * forcing(t_mid, mid);
    }
    if (!finite_and_bounded(x)) {
      std::ostringstream msg;
      msg << "non-finite or overflowing field at t = " << t0 + dt << " (step " << step << ")";
      throw IntegrationError(msg.str(), std::move(traj));
    }
    c = op.analyze(x);
    c.array() *= half.array();
    u = op.synthesize(c);

    const double next_density = l4_density(grid, u);
    l4_cum += 0.5 * dt * (density + next_density);
    density = next_density;

    if (step % cfg.record_every == 0 || step == steps) record(static_cast<double>(step) * dt);
  }
  return traj;
}

Forcing interpolated_forcing(std::vector<double> times, std::vector<RadialField> values) {
  if (times.size() != values.size() || times.empty()) {
    throw ConfigError("interpolated_forcing: times and values must be non-empty and aligned");
  }
  return [times = std::move(times), values = std::move(values)](double t, const RadialField&) {
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const double a = times[j - 1];
    const double b = times[j];
    const double theta = (t - a) / (b - a);
    return RadialField((1.0 - theta) * values[j - 1] + theta * values[j]);
  };
}

Zeta2Comparison solve_difference_zeta2(const SpectralOperator& op, const Trajectory& u,
                                       const Trajectory& psi, const Trajectory& zeta1) {
  const auto n_snap = u.snapshots.size();
  if (n_snap < 2 || psi.snapshots.size() != n_snap || zeta1.snapshots.size() != n_snap) {
    throw ConfigError("solve_difference_zeta2: trajectories must share a time grid of >= 2 points");
  }
  const double tol = 1e-12 * std::max(1.0, u.snapshots.back().t);
  for (std::size_t j = 0; j < n_snap; ++j) {
    if (std::abs(psi.snapshots[j].t - u.snapshots[j].t) > tol ||
        std::abs(zeta1.snapshots[j].t - u.snapshots[j].t) > tol) {
      throw ConfigError("solve_difference_zeta2: mismatched time grids");
    }
  }
  const double spacing = u.snapshots[1].t - u.snapshots[0].t;
  for (std::size_t j = 1; j < n_snap; ++j) {
    if (std::abs(u.snapshots[j].t - u.snapshots[j - 1].t - spacing) > 1e-9 * spacing) {
      throw ConfigError("solve_difference_zeta2: snapshots must be uniformly spaced");
    }
  }

  const int p = u.config.p;
  Zeta2Comparison out;
  out.times = u.times();
  std::vector<RadialField> forcing_values;
  forcing_values.reserve(n_snap);
  for (std::size_t j = 0; j < n_snap; ++j) {
    const auto& uj = u.snapshots[j].field;
    const auto& zj = zeta1.snapshots[j].field;
    out.algebraic.push_back(uj - psi.snapshots[j].field - zj);
    forcing_values.push_back(power_nonlinearity(uj, p) - power_nonlinearity(zj, p));
    out.forcing_scale = std::max(out.forcing_scale, op.grid().l2_norm(forcing_values.back()));
  }

  FlowConfig cfg = u.config;
  cfg.dt = spacing;
  cfg.t_end = out.times.back() - out.times.front();
  cfg.record_every = 1;
  cfg.self_interaction = false;
  const double t_origin = out.times.front();
  std::vector<double> local_times;
  for (double t : out.times) local_times.push_back(t - t_origin);
  const Trajectory direct = evolve_nls(op, RadialField::Zero(static_cast<Eigen::Index>(op.size())), cfg,
                                       interpolated_forcing(local_times, std::move(forcing_values)));
  if (direct.snapshots.size() != n_snap) {
    throw ConfigError("solve_difference_zeta2: time grid is not a whole number of steps");
  }
  for (std::size_t j = 0; j < n_snap; ++j) {
    out.direct.push_back(direct.snapshots[j].field);
    const double d = op.grid().l2_norm(out.direct[j] - out.algebraic[j]);
    out.discrepancy.push_back(d);
    out.max_discrepancy = std::max(out.max_discrepancy, d);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,mass,energy,l4_cum,h1,hs\n";
  out.precision(17);
  for (const auto& s : traj.snapshots) {
    out << s.t << ',' << s.mass << ',' << s.energy << ',' << s.l4_cum << ',' << s.h1 << ',' << s.hs
        << '\n';
  }
}

void write_field_dump(const std::filesystem::path& path, const Trajectory& traj) {
  std::vector<char> buf;
  const std::size_t n = traj.snapshots.empty() ? 0 : static_cast<std::size_t>(traj.snapshots[0].field.size());
  detail::put_f64(buf, static_cast<double>(traj.snapshots.size()));
  detail::put_f64(buf, static_cast<double>(n));
  for (const auto& s : traj.snapshots) {
    detail::put_f64(buf, s.t);
    for (Eigen::Index k = 0; k < s.field.size(); ++k) detail::put_f64(buf, s.field[k].real());
    for (Eigen::Index k = 0; k < s.field.size(); ++k) detail::put_f64(buf, s.field[k].imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write field dump " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace hyplab
