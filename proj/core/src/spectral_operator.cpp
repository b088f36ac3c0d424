#include "hyplab/spectral_operator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "binary_io.hpp"
#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

constexpr double kResidualTolerance = 1e-8;

double backend_code(GeometryKind kind) { return kind == GeometryKind::Hyperbolic2 ? 0.0 : 1.0; }

using detail::get_f64;
using detail::put_f64;

// Complex vector as an n x 2 real block so both parts go through one GEMM.
Eigen::MatrixX2d split(const Eigen::VectorXcd& z) {
  Eigen::MatrixX2d m(z.size(), 2);
  m.col(0) = z.real();
  m.col(1) = z.imag();
  return m;
}

Eigen::VectorXcd join(const Eigen::MatrixX2d& m) {
  Eigen::VectorXcd z(m.rows());
  z.real() = m.col(0);
  z.imag() = m.col(1);
  return z;
}

// Stiffness A carries the flux w_{k+1/2} (f_{k+1} - f_k)/h through each face,
// zero flux at the origin and ghost value 0 beyond the last node. Returns the
// diagonals of S = Q^{-1/2} A Q^{-1/2}.
void assemble_symmetric(const RadialGrid& grid, Eigen::VectorXd& diag, Eigen::VectorXd& offdiag) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h = grid.spacing();
  const Eigen::VectorXd& q = grid.quad_weights();
  const Eigen::VectorXd& wf = grid.face_weights();
  diag.resize(n);
  offdiag.resize(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    double a = wf[k] / h;
    if (k > 0) a += wf[k - 1] / h;
    diag[k] = a / q[k];
  }
  for (Eigen::Index k = 0; k + 1 < n; ++k) offdiag[k] = (-wf[k] / h) / std::sqrt(q[k] * q[k + 1]);
}

}  // namespace

SpectralOperator::SpectralOperator(RadialGrid grid, Eigen::VectorXd diag, Eigen::VectorXd offdiag)
    : grid_(std::move(grid)), sym_diag_(std::move(diag)), sym_offdiag_(std::move(offdiag)) {
  sqrt_q_ = grid_.quad_weights().cwiseSqrt();
  inv_sqrt_q_ = sqrt_q_.cwiseInverse();
}

SpectralOperator SpectralOperator::build(const RadialGrid& grid) {
  Eigen::VectorXd sd;
  Eigen::VectorXd so;
  assemble_symmetric(grid, sd, so);

  SpectralOperator op(grid, sd, so);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(sd, so, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw EigensolverError("tridiagonal eigensolver did not converge", std::nan(""));
  }
  op.finish_from(solver.eigenvalues(), solver.eigenvectors());
  const double residual = op.max_eigen_residual();
  if (!(residual <= kResidualTolerance)) {
    std::ostringstream msg;
    msg << "eigenpair residual " << residual << " exceeds " << kResidualTolerance;
    throw EigensolverError(msg.str(), residual);
  }
  return op;
}

void SpectralOperator::finish_from(Eigen::VectorXd eigenvalues, Eigen::MatrixXd vectors) {
  eigenvalues_ = std::move(eigenvalues);
  vectors_ = std::move(vectors);
  // Sign convention: v_k(r_1) >= 0.
  for (Eigen::Index k = 0; k < vectors_.cols(); ++k) {
    if (vectors_(0, k) < 0.0) vectors_.col(k) = -vectors_.col(k);
  }
}

RadialField SpectralOperator::eigenvector(std::size_t k) const {
  const Eigen::VectorXd v = vectors_.col(static_cast<Eigen::Index>(k)).cwiseProduct(inv_sqrt_q_);
  return v.cast<std::complex<double>>();
}

Eigen::VectorXcd SpectralOperator::analyze(const RadialField& f) const {
  Eigen::MatrixX2d g = split(f);
  g.col(0).array() *= sqrt_q_.array();
  g.col(1).array() *= sqrt_q_.array();
  Eigen::MatrixX2d c(g.rows(), 2);
  c.noalias() = vectors_.transpose() * g;
  return join(c);
}

RadialField SpectralOperator::synthesize(const Eigen::VectorXcd& coefficients) const {
  const Eigen::MatrixX2d c = split(coefficients);
  Eigen::MatrixX2d g(c.rows(), 2);
  g.noalias() = vectors_ * c;
  g.col(0).array() *= inv_sqrt_q_.array();
  g.col(1).array() *= inv_sqrt_q_.array();
  return join(g);
}

Eigen::MatrixXcd SpectralOperator::analyze_columns(const Eigen::MatrixXcd& f) const {
  const Eigen::Index m = f.cols();
  Eigen::MatrixXd g(f.rows(), 2 * m);
  g.leftCols(m) = sqrt_q_.asDiagonal() * f.real();
  g.rightCols(m) = sqrt_q_.asDiagonal() * f.imag();
  Eigen::MatrixXd c(f.rows(), 2 * m);
  c.noalias() = vectors_.transpose() * g;
  Eigen::MatrixXcd out(f.rows(), m);
  out.real() = c.leftCols(m);
  out.imag() = c.rightCols(m);
  return out;
}

Eigen::MatrixXcd SpectralOperator::synthesize_columns(const Eigen::MatrixXcd& coefficients) const {
  const Eigen::Index m = coefficients.cols();
  Eigen::MatrixXd c(coefficients.rows(), 2 * m);
  c.leftCols(m) = coefficients.real();
  c.rightCols(m) = coefficients.imag();
  Eigen::MatrixXd g(coefficients.rows(), 2 * m);
  g.noalias() = vectors_ * c;
  Eigen::MatrixXcd out(coefficients.rows(), m);
  out.real() = inv_sqrt_q_.asDiagonal() * g.leftCols(m);
  out.imag() = inv_sqrt_q_.asDiagonal() * g.rightCols(m);
  return out;
}

Eigen::VectorXcd SpectralOperator::multiplier(const SpectralFunction& g) const {
  Eigen::VectorXcd m(eigenvalues_.size());
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    const std::complex<double> value = g(eigenvalues_[k]);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      std::ostringstream msg;
      msg << "spectral function is not finite at eigenvalue index " << k << " (lambda = "
          << eigenvalues_[k] << ")";
      throw EvaluationError(msg.str(), static_cast<std::size_t>(k), eigenvalues_[k]);
    }
    m[k] = value;
  }
  return m;
}

RadialField SpectralOperator::apply(const SpectralFunction& g, const RadialField& f) const {
  return apply_multiplier(multiplier(g), f);
}

RadialField SpectralOperator::apply_multiplier(const Eigen::VectorXcd& multiplier,
                                               const RadialField& f) const {
  Eigen::VectorXcd c = analyze(f);
  c.array() *= multiplier.array();
  return synthesize(c);
}

RadialField SpectralOperator::apply_laplacian(const RadialField& f) const {
  // S acts on Q^{1/2} f; -Delta f = Q^{-1/2} S Q^{1/2} f.
  const Eigen::Index n = f.size();
  RadialField g = f.cwiseProduct(sqrt_q_.cast<std::complex<double>>());
  RadialField out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> acc = sym_diag_[k] * g[k];
    if (k > 0) acc += sym_offdiag_[k - 1] * g[k - 1];
    if (k + 1 < n) acc += sym_offdiag_[k] * g[k + 1];
    out[k] = acc * inv_sqrt_q_[k];
  }
  return out;
}

double SpectralOperator::sobolev_norm_from_coefficients(const Eigen::VectorXcd& c, double sigma,
                                                        SobolevKind kind) const {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double base = kind == SobolevKind::Inhomogeneous ? 1.0 + eigenvalues_[k] : eigenvalues_[k];
    acc += std::pow(base, sigma) * std::norm(c[k]);
  }
  return std::sqrt(acc);
}

double SpectralOperator::sobolev_norm(const RadialField& f, double sigma, SobolevKind kind) const {
  if (!(sigma >= -2.0 && sigma <= 2.0)) {
    throw DomainError("sobolev_norm: sigma must lie in [-2, 2]");
  }
  return sobolev_norm_from_coefficients(analyze(f), sigma, kind);
}

double SpectralOperator::fractional_norm(const RadialField& f, double alpha) const {
  return sobolev_norm_from_coefficients(analyze(f), 2.0 * alpha, SobolevKind::Homogeneous);
}

double SpectralOperator::gradient_norm(const RadialField& f) const {
  const std::complex<double> e = grid_.inner(apply_laplacian(f), f);
  return std::sqrt(std::max(0.0, e.real()));
}

double SpectralOperator::max_eigen_residual() const {
  const Eigen::Index n = vectors_.rows();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double sv = sym_diag_[i] * vectors_(i, k);
      if (i > 0) sv += sym_offdiag_[i - 1] * vectors_(i - 1, k);
      if (i + 1 < n) sv += sym_offdiag_[i] * vectors_(i + 1, k);
      const double r = sv - eigenvalues_[k] * vectors_(i, k);
      acc += r * r;
    }
    worst = std::max(worst, std::sqrt(acc) / std::max(1.0, std::abs(eigenvalues_[k])));
  }
  return worst;
}

namespace {

std::vector<char> serialize(const RadialGrid& grid, const Eigen::VectorXd& values,
                            const Eigen::MatrixXd& vectors) {
  std::vector<char> buf;
  const auto n = values.size();
  buf.reserve(static_cast<std::size_t>(8 * (3 + n + n * n)));
  put_f64(buf, backend_code(grid.kind()));
  put_f64(buf, grid.r_max());
  put_f64(buf, static_cast<double>(grid.size()));
  for (Eigen::Index k = 0; k < n; ++k) put_f64(buf, values[k]);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) put_f64(buf, vectors(i, j));
  return buf;
}

}  // namespace

void SpectralOperator::save_cache(const std::filesystem::path& path) const {
  const auto buf = serialize(grid_, eigenvalues_, vectors_);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write eigenpair cache " + tmp);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  std::filesystem::rename(tmp, path);
}

std::optional<SpectralOperator> SpectralOperator::load_cache(const std::filesystem::path& path,
                                                             const RadialGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto n = static_cast<Eigen::Index>(grid.size());
  const std::size_t expected = static_cast<std::size_t>(8 * (3 + n + n * n));
  if (buf.size() != expected) return std::nullopt;
  const char* p = buf.data();
  if (get_f64(p) != backend_code(grid.kind()) || get_f64(p + 8) != grid.r_max() ||
      get_f64(p + 16) != static_cast<double>(grid.size())) {
    return std::nullopt;
  }
  p += 24;
  Eigen::VectorXd values(n);
  for (Eigen::Index k = 0; k < n; ++k, p += 8) values[k] = get_f64(p);
  Eigen::MatrixXd vectors(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i, p += 8) vectors(i, j) = get_f64(p);

  Eigen::VectorXd sd;
  Eigen::VectorXd so;
  assemble_symmetric(grid, sd, so);
  SpectralOperator op(grid, std::move(sd), std::move(so));
  op.eigenvalues_ = std::move(values);
  op.vectors_ = std::move(vectors);
  if (!(op.max_eigen_residual() <= kResidualTolerance)) return std::nullopt;
  return op;
}

std::uint64_t SpectralOperator::content_hash() const {
  const auto buf = serialize(grid_, eigenvalues_, vectors_);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : buf) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

SpectralOperator build_operator(const RadialGrid& grid) { return SpectralOperator::build(grid); }

RadialField apply_spectral_function(const SpectralOperator& op, const SpectralFunction& g,
                                    const RadialField& f) {
  return op.apply(g, f);
}

double sobolev_norm(const SpectralOperator& op, const RadialField& f, double sigma, SobolevKind kind) {
  return op.sobolev_norm(f, sigma, kind);
}

std::filesystem::path cache_file_name(const RadialGrid& grid) {
  std::ostringstream name;
  name.precision(17);
  name << "eig_" << to_string(grid.kind()) << "_r" << grid.r_max() << "_n" << grid.size() << ".bin";
  return name.str();
}

SpectralOperator build_operator_cached(const RadialGrid& grid,
                                       const std::optional<std::filesystem::path>& cache_dir) {
  if (!cache_dir) return SpectralOperator::build(grid);
  const auto path = *cache_dir / cache_file_name(grid);
  if (auto cached = SpectralOperator::load_cache(path, grid)) return std::move(*cached);
  SpectralOperator op = SpectralOperator::build(grid);
  op.save_cache(path);
  return op;
}

}  // namespace hyplab
