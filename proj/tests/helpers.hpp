#pragma once

#include <vector>

#include "ninput/sphere.hpp"

namespace ninput::testing {

/// e_i in R^d, 1-based like the usual notation.
inline UnitVector e(int d, int i, double sign = 1.0) { return UnitVector::basis(d, i - 1, sign); }

inline DiscreteMeasure dirac(const UnitVector& x, double w = 1.0) { return DiscreteMeasure::dirac(x, w); }

inline std::vector<UnitVector> random_points(int d, std::size_t n, std::uint64_t seed) {
  return sample_sphere(d, n, seed).points();
}

}  // namespace ninput::testing
