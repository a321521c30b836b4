#pragma once

// Closed-form pointwise bounds and the necessary conditions that go with them.
//
// Every function takes the value of a potential at one point (G1(x), or
// G(h^q dsigma)(x) for the weighted forms) and a maximum-principle constant
// b >= 1. Conditions are data: a violated necessary condition is reported, not
// thrown.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potlab/measure_kernel.hpp"
#include "potlab/nonlinearity.hpp"

namespace potlab {

enum class Condition { holds, violated, not_applicable };
std::string to_string(Condition c);

struct BoundValue {
    double bound = 0.0;
    Condition condition = Condition::not_applicable;
    bool boundary = false;  // within 1e-12 of the threshold, classified violated
};

/// u >= 1 + b (F^{-1}(pot / b) - 1), increasing g; needs pot / b < F(inf).
/// Violated condition: bound = +inf.
BoundValue lower_bound_general(double pot, double b, const Nonlinearity& g);

/// Same for g(s) = s^q, q > 0, in closed form (exponential form at q = 1).
BoundValue lower_bound_power(double pot, double b, double q);

/// u <= 1 - b (1 - F^{-1}(pot / b)), decreasing g; needs pot / b < F(1 - 1/b).
/// Violated condition: bound = 0.
BoundValue upper_bound_general(double pot, double b, const Nonlinearity& g);

/// Same for g(s) = s^q, q < 0, in closed form.
BoundValue upper_bound_power_negative(double pot, double b, double q);

/// Threshold on pot for the decreasing power case: (b / (1 - q)) (1 - (1 - 1/b)^(1 - q)).
double upper_power_threshold(double b, double q);

/// Weighted forms: h(x) times the h = 1 bound at pot_hq / h(x), where
/// pot_hq = G(h^q dsigma)(x). q > 0 gives a lower bound, q < 0 an upper bound.
BoundValue bounds_with_h(double pot_hq, double h_at_x, double b, double q);

/// u >= (1 - q)^(1 / (1 - q)) b^(-q / (1 - q)) pot^(1 / (1 - q)), 0 < q < 1.
double homogeneous_sublinear_bound(double pot, double b, double q);

struct IteratedBound {
    double value = 0.0;
    bool overflow = false;  // value replaced by the trivial bound 0
};

/// f_k(x) >= f_0(x)^(1 + q + ... + q^k) / (c(q, k) b^(q + ... + q^k)).
IteratedBound iterated_power_bound(double f0, double b, double q, int k);

/// Residuals of [G1]^r <= r b^(r-1) G[(G1)^(r-1)] (r >= 1: rhs - lhs) and of
/// its converse for 0 < r <= 1 (lhs - rhs). Where both sides are infinite the
/// residual is 0.
Vector power_iterate_inequality_check(const Kernel& kernel, const MeasureSpace& space, double r, double b);

struct BoundRow {
    double pot = 0.0;
    double h = 1.0;
    BoundValue value;
    std::optional<double> reference;  // u(x) when a solution is supplied
    std::optional<double> margin;     // u - bound (lower) or bound - u (upper)
};

struct BoundReport {
    std::string theorem;      // e.g. "lower-power", "upper-power", "homogeneous"
    std::string nonlinearity; // descriptor of g
    double b = 1.0;
    bool lower = true;
    std::vector<BoundRow> rows;

    double min_margin() const;
    /// Points with margin < -1e-9 (1 + |u|).
    std::size_t violations() const;
};

/// Per-point report for g(s) = s^q with weight h (h = all ones for the plain
/// theorems). u, if nonempty, supplies reference values for margins.
BoundReport power_bound_report(std::span<const double> pot_hq, std::span<const double> h, double b, double q,
                               std::span<const double> u = {});

}  // namespace potlab
