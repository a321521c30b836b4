#pragma once

// Arithmetic on the extended half-line [0, +inf].
//
// Every module uses the same contract: +inf is stored natively as an IEEE
// infinity, inf * 0 = 0 (integration over a null set), and inf + finite = inf.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace potlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Product with the convention inf * 0 = 0.
inline double ext_mul(double a, double b) noexcept {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

/// Quotient a / b for a >= 0, b >= 0: x / 0 = inf for x > 0, 0 / 0 = 0, inf / inf = inf.
inline double ext_div(double a, double b) noexcept {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return kInf;
    if (std::isinf(a) && std::isinf(b)) return kInf;
    return a / b;
}

/// Reciprocal used for d = 1/K: 1/0 = inf, 1/inf = 0.
inline double ext_recip(double k) noexcept {
    if (k == 0.0) return kInf;
    if (std::isinf(k)) return 0.0;
    return 1.0 / k;
}

inline bool is_extended_nonneg(double x) noexcept { return !std::isnan(x) && x >= 0.0; }

/// Contract violation on inputs (bad dimensions, out-of-domain arguments).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its post-condition.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace potlab
