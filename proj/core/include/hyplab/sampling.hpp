#pragma once

#include <cstdint>
#include <random>

#include "hyplab/spectral_operator.hpp"

namespace hyplab {

// Sample families shared by the inequality checks and their tests. All are
// deterministic functions of the seed.

// Sum of 1-4 Gaussian bumps exp(-((r - c)/w)^2) with random centres in
// [0, r_max/3], widths in [0.3, 2], complex amplitudes and radial phase
// e^{i kappa r}, |kappa| <= 3. Vanishes to roundoff at r_max for r_max >= 10.
RadialField random_smooth_field(const RadialGrid& grid, std::mt19937_64& rng);

// Random spectral coefficients with |c_k| ~ (1 + lambda_k)^{-decay/2}.
RadialField random_spectral_field(const SpectralOperator& op, std::mt19937_64& rng,
                                  double decay = 2.0);

// Single interior bump of width `width` centred at `centre`.
RadialField bump_field(const RadialGrid& grid, double centre, double width);

}  // namespace hyplab
