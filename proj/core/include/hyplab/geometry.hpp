#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

#include <Eigen/Core>

namespace hyplab {

// Complex radial profile sampled at the nodes of a RadialGrid.
using RadialField = Eigen::VectorXcd;

enum class GeometryKind { Hyperbolic2, Euclidean2 };

std::string_view to_string(GeometryKind kind);
// Accepts "hyperbolic2"/"H2" and "euclidean2"/"R2" (case-insensitive).
GeometryKind parse_geometry(std::string_view name);

// Radial geometry backend: volume density w(r) in d(vol) = w(r) dr dtheta.
struct GeometryBackend {
  GeometryKind kind = GeometryKind::Hyperbolic2;

  // sinh(r) on H^2, r on R^2.
  double volume_weight(double r) const;
  // w'(r): cosh(r) on H^2, 1 on R^2.
  double volume_weight_derivative(double r) const;
  // Antiderivative W with W(0) = 0.
  double volume_integral(double r) const;
  // a'(r) for the radial solution of Delta a = 1 regular at the origin.
  double morawetz_weight_gradient(double r) const;
  double morawetz_weight_second_derivative(double r) const;
};

double volume_weight(const GeometryBackend& backend, double r);
double morawetz_weight_gradient(const GeometryBackend& backend, double r);

// Uniform cell-centred mesh r_k = k h, k = 1..n, h = r_max/(n+1).
//
// The quadrature weight of node k is the exact integral of w over its
// finite-volume cell: [0, 3h/2] for the first node, [r_k - h/2, r_k + h/2]
// in the interior and [r_n - h/2, r_max] for the last node. The cells tile
// [0, r_max], so the weights sum to the exact volume integral of w.
class RadialGrid {
 public:
  RadialGrid(GeometryBackend backend, double r_max, std::size_t n);

  const GeometryBackend& backend() const noexcept { return backend_; }
  GeometryKind kind() const noexcept { return backend_.kind; }
  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nodes_.size()); }
  double spacing() const noexcept { return h_; }

  const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
  const Eigen::VectorXd& quad_weights() const noexcept { return weights_; }
  // w at the cell faces r_{k+1/2} = (k + 1/2) h, k = 1..n.
  const Eigen::VectorXd& face_weights() const noexcept { return face_weights_; }

  double integrate(const Eigen::VectorXd& values) const;
  // Weighted L^2 inner product sum_k q_k f_k conj(g_k).
  std::complex<double> inner(const RadialField& f, const RadialField& g) const;
  double l2_norm(const RadialField& f) const;
  // (sum_k q_k |f_k|^p)^{1/p}; p = infinity gives the max norm.
  double lp_norm(const RadialField& f, double p) const;

 private:
  GeometryBackend backend_;
  double r_max_;
  double h_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd face_weights_;
};

// ||w^{1/2} f||_inf over the nodes (sinh^{1/2}(r) |f| on H^2).
double weighted_sup(const RadialGrid& grid, const RadialField& f);

RadialGrid make_grid(GeometryBackend backend, double r_max, std::size_t n);

// Staggered derivative (f_{k+1} - f_k)/h at the faces r_{k+1/2}, k = 1..n;
// the last face uses the Dirichlet value f_{n+1} = 0.
RadialField face_gradient(const RadialGrid& grid, const RadialField& f);
// Average (f_k + f_{k+1})/2 at the same faces, with f_{n+1} = 0.
RadialField face_average(const RadialGrid& grid, const RadialField& f);

}  // namespace hyplab
