#include "hyplab/heat_lp.hpp"

#include <cmath>
#include <thread>

#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

void require_positive(double s, const char* what) {
  if (!(s > 0.0)) throw DomainError(std::string(what) + ": heat time must be > 0");
}

}  // namespace

double heat_symbol(double s, double lambda) { return std::exp(-s * lambda); }

double band_symbol(double s, double lambda) { return s * lambda * std::exp(-s * lambda); }

double high_pass_symbol(double s, double lambda) { return -std::expm1(-s * lambda); }

RadialField heat(const SpectralOperator& op, double s, const RadialField& f) {
  if (!(s >= 0.0)) throw DomainError("heat: heat time must be >= 0");
  if (s == 0.0) return f;
  return op.apply([s](double lam) { return heat_symbol(s, lam); }, f);
}

RadialField band(const SpectralOperator& op, double s, const RadialField& f) {
  require_positive(s, "band");
  return op.apply([s](double lam) { return band_symbol(s, lam); }, f);
}

RadialField low_pass(const SpectralOperator& op, double s, const RadialField& f) {
  require_positive(s, "low_pass");
  return heat(op, s, f);
}

RadialField high_pass(const SpectralOperator& op, double s, const RadialField& f) {
  require_positive(s, "high_pass");
  return f - heat(op, s, f);
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) out[j] = std::exp(a + step * static_cast<double>(j));
  return out;
}

std::vector<double> ladder_times(const SpectralOperator& op, std::size_t m) {
  if (m < 32) throw ConfigError("LP ladder needs at least 32 heat times");
  return log_space(1e-5 / op.lambda_max(), 25.0 / op.lambda_min(), m);
}

LPLadder make_ladder(const SpectralOperator& op, const RadialField& f, std::size_t m, unsigned jobs) {
  LPLadder ladder;
  ladder.s_values = ladder_times(op, m);
  ladder.log_step = std::log(ladder.s_values[1] / ladder.s_values[0]);
  ladder.bands.resize(m);

  const Eigen::VectorXcd coeffs = op.analyze(f);
  const Eigen::VectorXd& lam = op.eigenvalues();
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t j = begin; j < m; j += stride) {
      Eigen::VectorXcd c = coeffs;
      for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= band_symbol(ladder.s_values[j], lam[k]);
      ladder.bands[j] = op.synthesize(c);
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, jobs);
  }
  return ladder;
}

RadialField ladder_sum(const LPLadder& ladder) {
  const std::size_t m = ladder.bands.size();
  RadialField acc = RadialField::Zero(ladder.bands.front().size());
  for (std::size_t j = 0; j < m; ++j) {
    const double weight = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
    acc += (weight * ladder.log_step) * ladder.bands[j];
  }
  return acc;
}

RadialField reconstruct(const SpectralOperator& op, const LPLadder& ladder, const RadialField& f) {
  return ladder_sum(ladder) + high_pass(op, ladder.s_values.front(), f) +
         low_pass(op, ladder.s_values.back(), f);
}

double reconstruction_residual(const SpectralOperator& op, const LPLadder& ladder,
                               const RadialField& f) {
  const auto& grid = op.grid();
  const double norm = grid.l2_norm(f);
  if (norm == 0.0) return 0.0;
  return grid.l2_norm(f - reconstruct(op, ladder, f)) / norm;
}

std::vector<BernsteinRow> bernstein_sweep(const SpectralOperator& op, const RadialField& f,
                                          double alpha, double beta,
                                          const std::vector<double>& s_list) {
  if (!(beta >= 0.0 && beta < alpha && alpha < beta + 1.0)) {
    throw ConfigError("bernstein_sweep requires 0 <= beta < alpha < beta + 1");
  }
  const Eigen::VectorXcd c = op.analyze(f);
  const Eigen::VectorXd& lam = op.eigenvalues();
  const double norm_alpha = op.sobolev_norm_from_coefficients(c, 2.0 * alpha, SobolevKind::Homogeneous);
  const double norm_beta = op.sobolev_norm_from_coefficients(c, 2.0 * beta, SobolevKind::Homogeneous);

  std::vector<BernsteinRow> rows;
  rows.reserve(s_list.size());
  for (double s : s_list) {
    require_positive(s, "bernstein_sweep");
    double low = 0.0;
    double high = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      const double a2 = std::norm(c[k]);
      const double hp = high_pass_symbol(s, lam[k]);
      const double lp = heat_symbol(s, lam[k]);
      low += std::pow(lam[k], 2.0 * beta) * hp * hp * a2;
      high += std::pow(lam[k], 2.0 * alpha) * lp * lp * a2;
    }
    BernsteinRow row;
    row.s = s;
    row.r_low = norm_alpha > 0.0 ? std::sqrt(low) / (std::pow(s, alpha - beta) * norm_alpha) : 0.0;
    row.r_high = norm_beta > 0.0 ? std::sqrt(high) / (std::pow(s, beta - alpha) * norm_beta) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

double smoothing_power_norm(const SpectralOperator& op, double s, double alpha, const RadialField& f) {
  require_positive(s, "smoothing_power_norm");
  return op.grid().l2_norm(op.apply(
      [s, alpha](double lam) { return std::pow(s * lam, alpha) * std::exp(-s * lam); }, f));
}

double smoothing_power_bound(double alpha) {
  return alpha > 0.0 ? std::pow(alpha / std::exp(1.0), alpha) : 1.0;
}

}  // namespace hyplab
