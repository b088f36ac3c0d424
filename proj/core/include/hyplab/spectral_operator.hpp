#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include <Eigen/Core>

#include "hyplab/geometry.hpp"

namespace hyplab {

enum class SobolevKind { Inhomogeneous, Homogeneous };

using SpectralFunction = std::function<std::complex<double>(double)>;

// Discrete radial -Delta = -(1/w)(w f')' with zero flux at the origin and a
// Dirichlet condition at r_max, together with its full eigendecomposition.
//
// With Q = diag(quad_weights) and A the (symmetric, tridiagonal) stiffness
// matrix, -Delta_h = Q^{-1} A. Eigenpairs are computed for the symmetric
// S = Q^{-1/2} A Q^{-1/2}; the physical eigenvectors v_k = Q^{-1/2} V_k are
// orthonormal in <f, g> = sum q f conj(g). Every function of the Laplacian is
// applied exactly on this basis.
class SpectralOperator {
 public:
  // Assembles and diagonalizes. Throws EigensolverError on failure.
  static SpectralOperator build(const RadialGrid& grid);

  const RadialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  double lambda_min() const { return eigenvalues_[0]; }
  double lambda_max() const { return eigenvalues_[eigenvalues_.size() - 1]; }

  // Orthonormal eigenvectors of the symmetrized matrix (columns).
  const Eigen::MatrixXd& symmetric_eigenvectors() const noexcept { return vectors_; }
  // v_k sampled at the nodes, unit norm in the weighted inner product.
  RadialField eigenvector(std::size_t k) const;

  // Coefficients <f, v_k>.
  Eigen::VectorXcd analyze(const RadialField& f) const;
  // sum_k c_k v_k.
  RadialField synthesize(const Eigen::VectorXcd& coefficients) const;
  // Column-wise versions; one GEMM for several fields.
  Eigen::MatrixXcd analyze_columns(const Eigen::MatrixXcd& fields) const;
  Eigen::MatrixXcd synthesize_columns(const Eigen::MatrixXcd& coefficients) const;

  // sum_k g(lambda_k) <f, v_k> v_k. Throws EvaluationError when g is not
  // finite at some eigenvalue.
  RadialField apply(const SpectralFunction& g, const RadialField& f) const;
  RadialField apply_multiplier(const Eigen::VectorXcd& multiplier, const RadialField& f) const;
  // Evaluates g at every eigenvalue with the finiteness check.
  Eigen::VectorXcd multiplier(const SpectralFunction& g) const;

  // -Delta_h f through the three-point stencil (no eigenbasis involved).
  RadialField apply_laplacian(const RadialField& f) const;

  // (sum (1+lambda)^sigma |c_k|^2)^{1/2}, or lambda^sigma for Homogeneous.
  double sobolev_norm(const RadialField& f, double sigma,
                      SobolevKind kind = SobolevKind::Inhomogeneous) const;
  double sobolev_norm_from_coefficients(const Eigen::VectorXcd& c, double sigma,
                                        SobolevKind kind = SobolevKind::Inhomogeneous) const;
  // ||(-Delta)^alpha f||_2 (homogeneous fractional power).
  double fractional_norm(const RadialField& f, double alpha) const;
  // ||grad f||_2 = <-Delta f, f>^{1/2}.
  double gradient_norm(const RadialField& f) const;

  // max_k ||S V_k - lambda_k V_k||_2 / max(1, |lambda_k|).
  double max_eigen_residual() const;

  // Binary eigenpair cache: little-endian float64 throughout. Header is the
  // three key fields (backend code 0 = hyperbolic2 / 1 = euclidean2, r_max,
  // n), followed by n eigenvalues and the n x n symmetric eigenvector matrix
  // in column-major order.
  void save_cache(const std::filesystem::path& path) const;
  // Returns nullopt if the file is missing or its key does not match grid.
  static std::optional<SpectralOperator> load_cache(const std::filesystem::path& path,
                                                    const RadialGrid& grid);
  // FNV-1a over the cache payload (header, eigenvalues, eigenvectors).
  std::uint64_t content_hash() const;

 private:
  SpectralOperator(RadialGrid grid, Eigen::VectorXd diag, Eigen::VectorXd offdiag);
  void finish_from(Eigen::VectorXd eigenvalues, Eigen::MatrixXd vectors);

  RadialGrid grid_;
  Eigen::VectorXd sqrt_q_;
  Eigen::VectorXd inv_sqrt_q_;
  // Symmetrized tridiagonal S.
  Eigen::VectorXd sym_diag_;
  Eigen::VectorXd sym_offdiag_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd vectors_;
};

// Convenience wrappers mirroring the operation names.
SpectralOperator build_operator(const RadialGrid& grid);
RadialField apply_spectral_function(const SpectralOperator& op, const SpectralFunction& g,
                                    const RadialField& f);
double sobolev_norm(const SpectralOperator& op, const RadialField& f, double sigma,
                    SobolevKind kind = SobolevKind::Inhomogeneous);

// Builds the operator, going through `cache_dir` when given: loads a matching
// cache file if present, otherwise builds and writes one.
SpectralOperator build_operator_cached(const RadialGrid& grid,
                                       const std::optional<std::filesystem::path>& cache_dir);
std::filesystem::path cache_file_name(const RadialGrid& grid);

}  // namespace hyplab
