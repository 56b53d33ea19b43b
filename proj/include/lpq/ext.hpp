#pragma once

// Shared small vocabulary: extended non-negative reals with the 0*inf = 0
// convention, three-valued verdict logic, divergence tags.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lpq {

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

// Product with the convention 0 * inf = 0 (used throughout the criterion
// formulas, where a vanishing weight kills a divergent moment).
inline double mul0(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

// pow that keeps 0^0 = 1 and inf^negative = 0, inf^positive = inf exact.
inline double xpow(double base, double e) {
  if (e == 0.0) return 1.0;
  if (base == 0.0) return e > 0.0 ? 0.0 : inf;
  if (std::isinf(base)) return e > 0.0 ? inf : 0.0;
  return std::pow(base, e);
}

enum class Tri { Yes, No, Inconclusive };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    default: return "inconclusive";
  }
}

// Which endpoint of an interval made an integral diverge.
enum class DivergeAt { None, Lower, Upper };

inline const char* to_string(DivergeAt d) {
  switch (d) {
    case DivergeAt::Lower: return "lower";
    case DivergeAt::Upper: return "upper";
    default: return "none";
  }
}

struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace lpq
