#include "hyplab/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

void require_nonnegative(double r, const char* what) {
  if (!(r >= 0.0)) {
    throw DomainError(std::string(what) + ": radius must be >= 0, got " + std::to_string(r));
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Hyperbolic2:
      return "hyperbolic2";
    case GeometryKind::Euclidean2:
      return "euclidean2";
  }
  return "unknown";
}

GeometryKind parse_geometry(std::string_view name) {
  const auto key = lower(name);
  if (key == "hyperbolic2" || key == "h2" || key == "hyperbolic") return GeometryKind::Hyperbolic2;
  if (key == "euclidean2" || key == "r2" || key == "euclidean") return GeometryKind::Euclidean2;
  throw ConfigError("unknown backend '" + std::string(name) + "' (expected hyperbolic2 or euclidean2)");
}

double GeometryBackend::volume_weight(double r) const {
  require_nonnegative(r, "volume_weight");
  return kind == GeometryKind::Hyperbolic2 ? std::sinh(r) : r;
}

double GeometryBackend::volume_weight_derivative(double r) const {
  require_nonnegative(r, "volume_weight_derivative");
  return kind == GeometryKind::Hyperbolic2 ? std::cosh(r) : 1.0;
}

double GeometryBackend::volume_integral(double r) const {
  require_nonnegative(r, "volume_integral");
  // cosh(r) - 1 written to avoid cancellation at small r.
  if (kind == GeometryKind::Hyperbolic2) {
    const double s = std::sinh(0.5 * r);
    return 2.0 * s * s;
  }
  return 0.5 * r * r;
}

double GeometryBackend::morawetz_weight_gradient(double r) const {
  require_nonnegative(r, "morawetz_weight_gradient");
  return kind == GeometryKind::Hyperbolic2 ? std::tanh(0.5 * r) : 0.5 * r;
}

double GeometryBackend::morawetz_weight_second_derivative(double r) const {
  require_nonnegative(r, "morawetz_weight_second_derivative");
  if (kind == GeometryKind::Hyperbolic2) {
    const double c = std::cosh(0.5 * r);
    return 0.5 / (c * c);
  }
  return 0.5;
}

double volume_weight(const GeometryBackend& backend, double r) { return backend.volume_weight(r); }

double morawetz_weight_gradient(const GeometryBackend& backend, double r) {
  return backend.morawetz_weight_gradient(r);
}

RadialGrid::RadialGrid(GeometryBackend backend, double r_max, std::size_t n)
    : backend_(backend), r_max_(r_max) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ConfigError("r_max must be a positive finite number, got " + std::to_string(r_max));
  }
  if (n < 16) {
    throw ConfigError("grid needs n >= 16 points, got " + std::to_string(n));
  }
  h_ = r_max / static_cast<double>(n + 1);
  const auto size = static_cast<Eigen::Index>(n);
  nodes_.resize(size);
  weights_.resize(size);
  face_weights_.resize(size);
  for (Eigen::Index k = 0; k < size; ++k) {
    nodes_[k] = static_cast<double>(k + 1) * h_;
    face_weights_[k] = backend_.volume_weight((static_cast<double>(k) + 1.5) * h_);
  }
  for (Eigen::Index k = 0; k < size; ++k) {
    const double lo = (k == 0) ? 0.0 : nodes_[k] - 0.5 * h_;
    const double hi = (k == size - 1) ? r_max_ : nodes_[k] + 0.5 * h_;
    weights_[k] = backend_.volume_integral(hi) - backend_.volume_integral(lo);
  }
}

double RadialGrid::integrate(const Eigen::VectorXd& values) const {
  return weights_.dot(values);
}

std::complex<double> RadialGrid::inner(const RadialField& f, const RadialField& g) const {
  std::complex<double> acc{0.0, 0.0};
  for (Eigen::Index k = 0; k < f.size(); ++k) acc += weights_[k] * f[k] * std::conj(g[k]);
  return acc;
}

double RadialGrid::l2_norm(const RadialField& f) const {
  return std::sqrt(weights_.dot(f.cwiseAbs2()));
}

double RadialGrid::lp_norm(const RadialField& f, double p) const {
  if (std::isinf(p)) return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) acc += weights_[k] * std::pow(std::abs(f[k]), p);
  return std::pow(acc, 1.0 / p);
}

RadialGrid make_grid(GeometryBackend backend, double r_max, std::size_t n) {
  return RadialGrid(backend, r_max, n);
}

RadialField face_gradient(const RadialGrid& grid, const RadialField& f) {
  const Eigen::Index n = f.size();
  RadialField d(n);
  const double inv_h = 1.0 / grid.spacing();
  for (Eigen::Index k = 0; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k]) * inv_h;
  d[n - 1] = -f[n - 1] * inv_h;
  return d;
}

RadialField face_average(const RadialGrid&, const RadialField& f) {
  const Eigen::Index n = f.size();
  RadialField a(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) a[k] = 0.5 * (f[k + 1] + f[k]);
  a[n - 1] = 0.5 * f[n - 1];
  return a;
}

double weighted_sup(const RadialGrid& grid, const RadialField& f) {
  const Eigen::VectorXd& r = grid.nodes();
  double best = 0.0;
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    best = std::max(best, std::sqrt(grid.backend().volume_weight(r[k])) * std::abs(f[k]));
  }
  return best;
}

}  // namespace hyplab
