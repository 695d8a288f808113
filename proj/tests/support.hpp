#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "beccert/distribution.hpp"

namespace beccert::testing {

/// Standardized law on k distinct atoms drawn uniformly from [-5, 5] with
/// Dirichlet(1) weights.
inline DiscreteDistribution random_standardized(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> atom(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < k) {
    const double x = atom(rng);
    if (std::none_of(xs.begin(), xs.end(), [x](double y) { return std::abs(x - y) < 1e-3; })) {
      xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> ps(k);
  double total = 0.0;
  for (auto& p : ps) total += p = -std::log1p(-unit(rng)) + 1e-3;
  for (auto& p : ps) p /= total;
  return standardize(DiscreteDistribution(xs, ps));
}

/// Centered but unscaled law on k atoms; used for sums of unequal summands.
inline DiscreteDistribution random_centered(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> scale(0.3, 2.0);
  return random_standardized(rng, k).scaled(scale(rng));
}

}  // namespace beccert::testing
