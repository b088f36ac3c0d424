#include "hyplab/sampling.hpp"

#include <cmath>
#include <numbers>

namespace hyplab {

RadialField random_smooth_field(const RadialGrid& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> centre(0.0, grid.r_max() / 3.0);
  std::uniform_real_distribution<double> width(0.3, 2.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> freq(-3.0, 3.0);

  const auto& r = grid.nodes();
  RadialField f = RadialField::Zero(r.size());
  const int bumps = count(rng);
  for (int b = 0; b < bumps; ++b) {
    const double c = centre(rng);
    const double w = width(rng);
    const std::complex<double> a{amp(rng), amp(rng)};
    const double kappa = freq(rng);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      const double x = (r[k] - c) / w;
      f[k] += a * std::exp(-x * x) * std::polar(1.0, kappa * r[k]);
    }
  }
  return f;
}

RadialField random_spectral_field(const SpectralOperator& op, std::mt19937_64& rng, double decay) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::VectorXd& lam = op.eigenvalues();
  Eigen::VectorXcd c(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double scale = std::pow(1.0 + lam[k], -0.5 * decay);
    c[k] = scale * std::complex<double>(gauss(rng), gauss(rng));
  }
  return op.synthesize(c);
}

RadialField bump_field(const RadialGrid& grid, double centre, double width) {
  const auto& r = grid.nodes();
  RadialField f(r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    const double x = (r[k] - centre) / width;
    f[k] = std::exp(-x * x);
  }
  return f;
}

}  // namespace hyplab
