#pragma once

namespace ninput {

/// Numerical tolerances shared by every module.
struct Tolerances {
  double geometric = 1e-12;    // unit norms, tangency, balance of measures
  double eigenvalue = 1e-9;    // relative to the max-abs matrix entry
  double mc_sigmas = 4.0;      // Monte-Carlo acceptance in standard errors
  double witness_truncation = 1e-12;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Largest kernel arity accepted by the exact tuple sums (cost grows as N^n).
inline constexpr int kMaxExactArity = 4;

/// Largest arity a kernel may have at all.
inline constexpr int kMaxArity = 8;

}  // namespace ninput
