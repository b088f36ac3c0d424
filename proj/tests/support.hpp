#pragma once

#include <complex>
#include <functional>
#include <map>

#include "hyplab/spectral_operator.hpp"

namespace hyplab::testing {

// Operators are expensive enough to share across tests in one binary.
inline const SpectralOperator& hyperbolic(std::size_t n = 256, double r_max = 15.0) {
  static std::map<std::pair<std::size_t, double>, SpectralOperator> cache;
  auto key = std::make_pair(n, r_max);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, build_operator(make_grid({GeometryKind::Hyperbolic2}, r_max, n))).first;
  }
  return it->second;
}

inline const SpectralOperator& euclidean(std::size_t n = 256, double r_max = 15.0) {
  static std::map<std::pair<std::size_t, double>, SpectralOperator> cache;
  auto key = std::make_pair(n, r_max);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, build_operator(make_grid({GeometryKind::Euclidean2}, r_max, n))).first;
  }
  return it->second;
}

inline RadialField sample(const RadialGrid& grid, const std::function<std::complex<double>(double)>& f) {
  RadialField out(grid.size());
  for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = f(grid.nodes()[k]);
  return out;
}

inline RadialField gaussian(const RadialGrid& grid, double amplitude = 1.0, double width = 1.0) {
  return sample(grid, [=](double r) { return std::complex<double>(amplitude * std::exp(-(r / width) * (r / width))); });
}

}  // namespace hyplab::testing
