#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "hyplab/errors.hpp"
#include "hyplab/sampling.hpp"
#include "hyplab/spectral_operator.hpp"
#include "support.hpp"

using namespace hyplab;
using hyplab::testing::euclidean;
using hyplab::testing::hyperbolic;

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::abs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// f(r_max) for f'' + coth(r) f' + lambda f = 0, f(0) = 1, f'(0) = 0.
double shoot_hyperbolic(double lambda, double r_max) {
  double r = 1e-6;
  double f = 1.0 - lambda * r * r / 4.0;
  double g = -lambda * r / 2.0;
  const int steps = 60000;
  const double h = (r_max - r) / steps;
  auto rhs = [lambda](double x, double y, double dy) { return -std::cosh(x) / std::sinh(x) * dy - lambda * y; };
  for (int i = 0; i < steps; ++i) {
    const double k1f = g, k1g = rhs(r, f, g);
    const double k2f = g + h / 2 * k1g, k2g = rhs(r + h / 2, f + h / 2 * k1f, g + h / 2 * k1g);
    const double k3f = g + h / 2 * k2g, k3g = rhs(r + h / 2, f + h / 2 * k2f, g + h / 2 * k2g);
    const double k4f = g + h * k3g, k4g = rhs(r + h, f + h * k3f, g + h * k3g);
    f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    g += h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    r += h;
  }
  return f;
}

RadialField random_field(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  RadialField f(n);
  for (auto& v : f) v = {normal(rng), normal(rng)};
  return f;
}

}  // namespace

TEST(SpectralOperator, EuclideanGroundStateMatchesBesselZero) {
  const double j01 = bisect([](double x) { return std::cyl_bessel_j(0.0, x); }, 2.0, 3.0);
  EXPECT_NEAR(j01, 2.404825557695773, 1e-12);
  for (std::size_t n : {256u, 512u}) {
    const auto& op = euclidean(n, 1.0);
    EXPECT_LE(std::abs(op.lambda_min() / (j01 * j01) - 1.0), 1e-3) << "n=" << n;
  }
}

TEST(SpectralOperator, HyperbolicGroundStateMatchesShooting) {
  const double lambda1 = bisect([](double l) { return shoot_hyperbolic(l, 15.0); }, 0.25, 0.35);
  const auto& op = hyperbolic(512, 15.0);
  EXPECT_LE(std::abs(op.lambda_min() / lambda1 - 1.0), 1e-3);
  EXPECT_GE(op.lambda_min(), 0.25 - 1e-6);
}

TEST(SpectralOperator, HyperbolicSpectralGap) {
  for (std::size_t n : {128u, 256u}) {
    for (double r_max : {5.0, 15.0, 25.0}) {
      const auto op = build_operator(make_grid({GeometryKind::Hyperbolic2}, r_max, n));
      EXPECT_GE(op.lambda_min(), 0.25 - 1e-6) << n << " " << r_max;
      EXPECT_LE(op.max_eigen_residual(), 1e-10);
    }
  }
}

TEST(SpectralOperator, EigenvaluesPositiveAndSorted) {
  const auto& op = hyperbolic();
  for (Eigen::Index k = 1; k < op.eigenvalues().size(); ++k) {
    EXPECT_GT(op.eigenvalues()[k], op.eigenvalues()[k - 1]);
  }
  EXPECT_GT(op.lambda_min(), 0.0);
}

TEST(SpectralOperator, SymmetricInWeightedInnerProduct) {
  const auto& op = hyperbolic();
  const auto& grid = op.grid();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const RadialField f = random_field(op.size(), rng);
    const RadialField g = random_field(op.size(), rng);
    const auto lhs = grid.inner(op.apply_laplacian(f), g);
    const auto rhs = grid.inner(f, op.apply_laplacian(g));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * grid.l2_norm(f) * grid.l2_norm(g));
  }
}

TEST(SpectralOperator, EigenvectorsOrthonormal) {
  const auto& op = hyperbolic();
  const Eigen::MatrixXd& v = op.symmetric_eigenvectors();
  const Eigen::MatrixXd gram = v.transpose() * v;
  const double dev = (gram - Eigen::MatrixXd::Identity(op.size(), op.size())).cwiseAbs().maxCoeff();
  EXPECT_LE(dev, 1e-8);
  const auto& grid = op.grid();
  EXPECT_NEAR(std::abs(grid.inner(op.eigenvector(3), op.eigenvector(3))), 1.0, 1e-12);
  EXPECT_LE(std::abs(grid.inner(op.eigenvector(3), op.eigenvector(4))), 1e-12);
}

TEST(SpectralOperator, StencilAgreesWithEigenbasis) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(3);
  const RadialField f = random_spectral_field(op, rng);
  const RadialField a = op.apply_laplacian(f);
  const RadialField b = op.apply([](double l) { return std::complex<double>(l); }, f);
  EXPECT_LE(op.grid().l2_norm(a - b), 1e-9 * op.grid().l2_norm(a));
}

TEST(SpectralOperator, Parseval) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const RadialField f = random_field(op.size(), rng);
    const double n2 = std::pow(op.grid().l2_norm(f), 2);
    EXPECT_NEAR(op.analyze(f).squaredNorm() / n2, 1.0, 1e-10);
    EXPECT_LE(op.grid().l2_norm(op.synthesize(op.analyze(f)) - f), 1e-10 * std::sqrt(n2));
  }
}

TEST(SpectralOperator, ColumnTransformsMatchSingle) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(5);
  Eigen::MatrixXcd fields(op.size(), 3);
  for (int c = 0; c < 3; ++c) fields.col(c) = random_field(op.size(), rng);
  const Eigen::MatrixXcd coeffs = op.analyze_columns(fields);
  const Eigen::MatrixXcd back = op.synthesize_columns(coeffs);
  for (int c = 0; c < 3; ++c) {
    EXPECT_LE((coeffs.col(c) - op.analyze(fields.col(c))).norm(), 1e-12 * coeffs.col(c).norm());
    EXPECT_LE((back.col(c) - fields.col(c)).norm(), 1e-10 * fields.col(c).norm());
  }
}

TEST(SpectralOperator, FunctionalCalculusIdentityAndEigenvector) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(1);
  const RadialField f = random_field(op.size(), rng);
  const RadialField same = apply_spectral_function(op, [](double) { return std::complex<double>(1.0); }, f);
  EXPECT_LE((same - f).cwiseAbs().maxCoeff(), 1e-12 * f.cwiseAbs().maxCoeff());

  const RadialField v3 = op.eigenvector(2);
  const RadialField lv3 = op.apply([](double l) { return std::complex<double>(l); }, v3);
  EXPECT_LE(op.grid().l2_norm(lv3 - op.eigenvalues()[2] * v3), 1e-10 * op.eigenvalues()[2]);
}

TEST(SpectralOperator, SemigroupAndSpectralMapping) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(2);
  const RadialField f = random_field(op.size(), rng);
  const double s = 0.01, t = 0.03;
  auto heat = [](double tau) { return [tau](double l) { return std::complex<double>(std::exp(-tau * l)); }; };
  const RadialField twice = op.apply(heat(t), op.apply(heat(s), f));
  const RadialField once = op.apply(heat(s + t), f);
  EXPECT_LE(op.grid().l2_norm(twice - once), 1e-10 * op.grid().l2_norm(f));

  auto g = [](double l) { return std::complex<double>(std::sqrt(l)); };
  auto h = [](double l) { return std::complex<double>(1.0 / (1.0 + l)); };
  const RadialField composed = op.apply([&](double l) { return g(l) * h(l); }, f);
  const RadialField sequential = op.apply(g, op.apply(h, f));
  EXPECT_LE(op.grid().l2_norm(composed - sequential), 1e-10 * op.grid().l2_norm(f));
}

TEST(SpectralOperator, NonFiniteSymbolNamesTheMode) {
  const auto& op = hyperbolic();
  const double target = op.eigenvalues()[5];
  const RadialField f = RadialField::Ones(op.size());
  try {
    op.apply([target](double l) { return std::complex<double>(l == target ? INFINITY : 1.0); }, f);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.index(), 5u);
    EXPECT_EQ(e.eigenvalue(), target);
  }
  EXPECT_THROW(op.apply([](double) { return std::complex<double>(NAN); }, f), EvaluationError);
}

TEST(SpectralOperator, SobolevNorms) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(4);
  const RadialField f = random_field(op.size(), rng);
  EXPECT_NEAR(op.sobolev_norm(f, 0.0) / op.grid().l2_norm(f), 1.0, 1e-10);
  const RadialField v1 = op.eigenvector(0);
  EXPECT_NEAR(sobolev_norm(op, v1, 1.0, SobolevKind::Homogeneous), std::sqrt(op.lambda_min()), 1e-10);
  EXPECT_NEAR(op.sobolev_norm(v1, 1.0), std::sqrt(1.0 + op.lambda_min()), 1e-10);
  EXPECT_NEAR(op.gradient_norm(f), op.sobolev_norm(f, 1.0, SobolevKind::Homogeneous),
              1e-9 * op.gradient_norm(f));
  EXPECT_THROW(op.sobolev_norm(f, 2.5), DomainError);
}

TEST(SpectralOperator, InterpolationHoldsWithUnitConstant) {
  const auto& op = hyperbolic();
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const RadialField f = (i % 2 == 0) ? random_spectral_field(op, rng) : random_smooth_field(op.grid(), rng);
    const double lhs = op.fractional_norm(f, 0.5);
    const double rhs = std::sqrt(op.grid().l2_norm(f) * op.fractional_norm(f, 1.0));
    EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
  }
}

TEST(SpectralOperator, CacheRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "hyplab_cache_test";
  std::filesystem::remove_all(dir);
  const RadialGrid grid = make_grid({GeometryKind::Hyperbolic2}, 10.0, 64);
  const SpectralOperator built = build_operator_cached(grid, dir);
  const auto file = dir / cache_file_name(grid);
  ASSERT_TRUE(std::filesystem::exists(file));
  const auto loaded = SpectralOperator::load_cache(file, grid);
  ASSERT_TRUE(loaded.has_value());
  EXPECT_EQ(loaded->eigenvalues(), built.eigenvalues());
  EXPECT_EQ(loaded->symmetric_eigenvectors(), built.symmetric_eigenvectors());
  EXPECT_EQ(loaded->content_hash(), built.content_hash());

  const RadialGrid other = make_grid({GeometryKind::Hyperbolic2}, 10.0, 65);
  EXPECT_FALSE(SpectralOperator::load_cache(file, other).has_value());
  EXPECT_FALSE(SpectralOperator::load_cache(dir / "missing.bin", grid).has_value());
  const RadialGrid euclid = make_grid({GeometryKind::Euclidean2}, 10.0, 64);
  EXPECT_FALSE(SpectralOperator::load_cache(file, euclid).has_value());
  EXPECT_NE(build_operator(euclid).content_hash(), built.content_hash());
  std::filesystem::remove_all(dir);
}
