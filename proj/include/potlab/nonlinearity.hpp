#pragma once

// The monotone nonlinearity g and the scalar objects derived from it:
//
//   increasing g on [1, inf):  F(t) = int_1^t ds / g(s),   phi(t) = g(t + 1)
//   decreasing g on [0, 1]:    F(t) = int_t^1 ds / g(s),   phi(t) = g(1 - t)
//
// psi(t) = phi(t / b) for a maximum-principle constant b >= 1, the comparison
// ladder psi_0(t) = t, psi_{k+1}(t) = int_0^t psi(psi_k(s)) ds, and its limit
// psi_inf, which solves psi_inf' = psi(psi_inf), psi_inf(0) = 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "potlab/extended.hpp"

namespace potlab {

using Vector = std::vector<double>;
using ScalarFn = std::function<double(double)>;

class Nonlinearity {
public:
    enum class Kind { power_increasing, power_decreasing, general_increasing, general_decreasing };

    /// g(s) = s^q; q > 0 gives the increasing kind, q < 0 the decreasing one.
    static Nonlinearity power(double q);
    /// Callable g, nondecreasing on [1, inf) with g(1) >= 1.
    static Nonlinearity general_increasing(ScalarFn g, std::string label = "general");
    /// Callable g, nonincreasing on (0, 1] with g(1) >= 1; g(0) may be +inf.
    static Nonlinearity general_decreasing(ScalarFn g, std::string label = "general");
    /// Tabulated g with linear interpolation. Increasing tables extrapolate the
    /// last segment to the right; decreasing tables hold g constant below t[0].
    static Nonlinearity tabulated_increasing(Vector t, Vector g);
    static Nonlinearity tabulated_decreasing(Vector t, Vector g);

    Kind kind() const noexcept { return kind_; }
    bool increasing() const noexcept { return kind_ == Kind::power_increasing || kind_ == Kind::general_increasing; }
    bool is_power() const noexcept { return kind_ == Kind::power_increasing || kind_ == Kind::power_decreasing; }
    /// Exponent of a power kind (NaN otherwise).
    double q() const noexcept { return q_; }
    const std::string& label() const noexcept { return label_; }
    /// Present for tabulated kinds.
    const std::optional<std::pair<Vector, Vector>>& table() const noexcept { return table_; }

    double operator()(double t) const;

    /// A short descriptor such as "power(q=2)".
    std::string describe() const;

private:
    Kind kind_ = Kind::power_increasing;
    double q_ = 1.0;
    ScalarFn fn_;
    std::string label_;
    std::optional<std::pair<Vector, Vector>> table_;
};

/// int_1^t ds/g(s) for an increasing kind, t >= 1.
double reciprocal_integral_above(const Nonlinearity& g, double t);
/// a = int_1^inf ds/g(s) in (0, +inf].
double reciprocal_integral_limit(const Nonlinearity& g);
/// int_t^1 ds/g(s) for a decreasing kind, 0 <= t <= 1.
double reciprocal_integral_below(const Nonlinearity& g, double t);
/// Inverse of whichever of the two integrals matches the kind of g.
/// Throws InvalidArgument when tau is outside the range of that integral.
double inverse_reciprocal_integral(const Nonlinearity& g, double tau);

/// psi(t) = g(t / b + 1) (increasing) or g(1 - t / b) (decreasing).
double comparison_function(const Nonlinearity& g, double b, double t);

/// Tabulated psi_0 .. psi_K on a uniform grid over [0, t_max].
struct ComparisonLadder {
    double b = 1.0;
    double t_max = 0.0;
    Vector grid;
    std::vector<Vector> levels;
    /// Number of leading grid nodes where each level is defined (a decreasing
    /// kind leaves the domain of psi once a level exceeds b).
    std::vector<std::size_t> valid_nodes;

    std::size_t depth() const noexcept { return levels.empty() ? 0 : levels.size() - 1; }
    /// Largest grid abscissa where level k is defined (-1 if none).
    double max_valid_t(std::size_t k) const;
    /// Linear interpolation of level k at t; NaN outside the valid range.
    double value(std::size_t k, double t) const;
};

ComparisonLadder comparison_ladder(const Nonlinearity& g, double b, std::size_t depth, double t_max,
                                   std::size_t grid_size = 4096);

struct ComparisonLimit {
    double closed_form = 0.0;  // b (F^{-1}(t / b) - 1), or b (1 - F^{-1}(t / b))
    double integrated = 0.0;   // RK4 on psi_inf' = psi(psi_inf)
    double relative_gap = 0.0;
    bool agrees = false;       // relative_gap <= 1e-8
};

/// psi_inf(t) two ways. Throws InvalidArgument if t / b is outside the
/// admissible range (the necessary condition fails there).
ComparisonLimit comparison_limit(const Nonlinearity& g, double b, double t, std::size_t rk4_steps = 20000);

struct IterationConstant {
    double value = 1.0;
    bool overflow = false;
};

/// c(q, k) = prod_{j=1}^{k} (1 + q + ... + q^j)^{q^{k-j}}.
IterationConstant iteration_constant(double q, int k);

}  // namespace potlab
