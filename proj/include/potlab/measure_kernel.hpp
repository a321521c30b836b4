#pragma once

// Finite measure spaces, measures, and dense kernels on them.
//
// A kernel G(x, dy) on a finite space is a nonnegative n x n matrix K together
// with the point weights w of the ambient measure: (Gf)_i = sum_j K_ij f_j w_j.
// `apply` multiplies by the weights, `potential` never does (its argument is
// already a measure).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potlab/extended.hpp"

namespace potlab {

using Vector = std::vector<double>;
using Coords = std::vector<double>;

class MeasureSpace {
public:
    MeasureSpace() = default;
    /// Weights must be >= 0 with at least one positive; coords (if given) one
    /// per point with a common dimension >= 1.
    explicit MeasureSpace(Vector weights, std::vector<Coords> coords = {});

    std::size_t size() const noexcept { return weights_.size(); }
    const Vector& weights() const noexcept { return weights_; }
    double weight(std::size_t i) const { return weights_.at(i); }
    bool has_coords() const noexcept { return !coords_.empty(); }
    std::size_t dim() const noexcept { return coords_.empty() ? 0 : coords_.front().size(); }
    const std::vector<Coords>& coords() const noexcept { return coords_; }
    const Coords& point(std::size_t i) const { return coords_.at(i); }
    double total_mass() const noexcept;
    /// Euclidean distance between points i and j (requires coordinates).
    double distance(std::size_t i, std::size_t j) const;

    /// Same points, new weights.
    MeasureSpace with_weights(Vector weights) const { return MeasureSpace(std::move(weights), coords_); }

private:
    Vector weights_;
    std::vector<Coords> coords_;
};

/// A nonnegative charge on the points of a space (nu, mu, sigma).
class Measure {
public:
    Measure() = default;
    explicit Measure(Vector values);
    static Measure zero(std::size_t n) { return Measure(Vector(n, 0.0)); }
    static Measure dirac(std::size_t n, std::size_t at, double mass = 1.0);
    static Measure of_space(const MeasureSpace& space) { return Measure(space.weights()); }

    std::size_t size() const noexcept { return values_.size(); }
    const Vector& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    Vector values_;
};

/// Dense row-major matrix over [0, +inf].
class Kernel {
public:
    Kernel() = default;
    Kernel(std::size_t n, Vector entries, bool symmetric, std::string name = {});
    static Kernel from_rows(const std::vector<Vector>& rows, bool symmetric, std::string name = {});
    static Kernel zero(std::size_t n) { return Kernel(n, Vector(n * n, 0.0), true, "zero"); }
    static Kernel identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
    const Vector& entries() const noexcept { return entries_; }
    std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
    bool symmetric() const noexcept { return symmetric_; }
    const std::string& name() const noexcept { return name_; }
    bool has_infinite() const noexcept { return has_infinite_; }
    /// Every off-diagonal entry is strictly positive (so d = 1/K is finite there).
    bool positive_off_diagonal() const noexcept;
    std::vector<Vector> rows() const;

private:
    std::size_t n_ = 0;
    Vector entries_;
    bool symmetric_ = false;
    bool has_infinite_ = false;
    std::string name_;
};

/// What to put on the diagonal of a kernel whose profile is singular at r = 0.
struct DiagonalPolicy {
    enum class Kind { exclude, cap, cell_average, singular };
    Kind kind = Kind::exclude;
    double ceiling = 0.0;  // cap
    Vector cell_values;    // cell_average, one per point

    static DiagonalPolicy exclude() { return {}; }
    static DiagonalPolicy cap(double ceiling) { return {Kind::cap, ceiling, {}}; }
    static DiagonalPolicy cell_average(Vector values) { return {Kind::cell_average, 0.0, std::move(values)}; }
    static DiagonalPolicy singular() { return {Kind::singular, 0.0, {}}; }
};

/// (Gf)_i = sum_j K_ij f_j w_j, with inf * 0 = 0. f must be nonnegative.
Vector apply(const Kernel& kernel, const MeasureSpace& space, std::span<const double> f);

/// (G nu)_i = sum_j K_ij nu_j.
Vector potential(const Kernel& kernel, const Measure& nu);
Vector potential(const Kernel& kernel, std::span<const double> nu);

/// G1: the potential of the ambient measure.
inline Vector unit_potential(const Kernel& kernel, const MeasureSpace& space) {
    return potential(kernel, space.weights());
}

/// K_ij = |x_i - x_j|^(alpha - dim), 0 < alpha < dim; diagonal per policy.
Kernel riesz_kernel(const MeasureSpace& space, double alpha, int dim,
                    const DiagonalPolicy& diagonal = DiagonalPolicy::exclude());

/// Mean of |y|^(alpha - dim) over the ball of radius half the nearest-neighbour
/// distance around each point: (dim / alpha) * rho^(alpha - dim). Intended as
/// cell-average diagonal values for `riesz_kernel`.
Vector riesz_ball_average_diagonal(const MeasureSpace& space, double alpha, int dim);

/// K_ij = k(|x_i - x_j|) for a positive nonincreasing profile k (diagonal k(0)).
using RadialProfile = std::function<double(double)>;
Kernel radial_kernel(const MeasureSpace& space, const RadialProfile& profile, std::string name = "radial");

/// Discretized running integral on an increasing 1-D grid: K_ij = 1 if x_j <= x_i.
Kernel volterra_kernel(const MeasureSpace& space);

/// Entrywise multiple lambda * K.
Kernel scale_kernel(const Kernel& kernel, double lambda);

struct ModifiedKernel {
    Kernel kernel;
    std::vector<std::size_t> indices;  // Omega_w as indices into the original space
};

/// K_w(x, y) = K(x, y) / (K(x, w) K(y, w)) on Omega_w = {x : 0 < K(x, w) < inf}.
ModifiedKernel modify_w(const Kernel& kernel, std::size_t w);

/// K^h(x, y) = K(x, y) / (h(x) h(y)).
Kernel modify_h(const Kernel& kernel, std::span<const double> h);

/// G^h(x, dy) = h(y)^q / h(x) G(x, dy).
Kernel weighted_kernel_gh(const Kernel& kernel, std::span<const double> h, double q);

/// Restriction of a space to a subset of its points (order preserved).
MeasureSpace restrict_space(const MeasureSpace& space, std::span<const std::size_t> indices);

}  // namespace potlab
