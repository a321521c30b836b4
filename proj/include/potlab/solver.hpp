#pragma once

// Reference solutions and lemma oracles.
//
//   increasing g:   u = G(g(u) dsigma) + h      (minimal solution, Picard from h)
//   decreasing g:   u = h - G(g(u) dsigma)      (maximal solution, Picard from h)
//   homogeneous:    u = G(u^q dsigma), 0 < q < 1

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potlab/measure_kernel.hpp"
#include "potlab/nonlinearity.hpp"

namespace potlab {

struct IterationTrace {
    std::vector<Vector> levels;      // f_0 = G1, f_{k+1} = G(phi(f_k))
    std::vector<bool> domain_exit;   // phi returned NaN or a negative value at this point
    /// First k at which phi(f_k) left its domain somewhere; levels above it are
    /// contaminated everywhere the kernel reaches.
    std::optional<std::size_t> first_exit_level;
};

/// phi is evaluated pointwise; an out-of-domain value is flagged and treated as 0.
IterationTrace iterate_f(const Kernel& kernel, const MeasureSpace& space, const ScalarFn& phi, std::size_t depth);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // rhs - lhs
};

/// int_0^{omega(Omega)} phi(t) dt <= sum_y phi(omega{z : f(z) <= f(y)}) omega_y.
InequalityCheck layer_cake_check(const MeasureSpace& omega, std::span<const double> f, const ScalarFn& phi);

/// int_0^{G1(x)} phi(t) dt <= G[phi(b G1)](x), with phi held constant beyond G1(x).
InequalityCheck key_lemma_check(const Kernel& kernel, const MeasureSpace& space, double b, const ScalarFn& phi,
                                std::size_t x);

struct PsiCheck {
    std::vector<Vector> residuals;  // [k][x] = f_k(x) - psi_k(f_0(x)); NaN where skipped
    std::vector<bool> skipped;      // ladder or phi left its domain at this point
    double min_residual = 0.0;
};

/// psi_k(f_0(x)) <= f_k(x) with phi(t) = g(t + 1) (or g(1 - t)) and psi(t) = phi(t / b).
PsiCheck iter_psi_check(const Kernel& kernel, const MeasureSpace& space, const Nonlinearity& g, double b,
                        std::size_t depth, std::size_t grid_size = 65537);

enum class PointStatus { converged, diverged, oscillating, no_positive_solution, degenerate };
std::string to_string(PointStatus s);

struct SolveResult {
    Vector u;
    std::size_t iterations = 0;
    std::vector<PointStatus> status;
    double residual = 0.0;  // sup over converged points of |T(u) - u|
    Vector defect;          // |T(u) - u| per point (inf where u is infinite)

    bool all_converged() const;
    std::size_t count(PointStatus s) const;
};

struct SolveOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
    double ceiling = 1e100;
    double theta = 1.0;   // damping for the decreasing case
    Vector sigma;         // defaults to the space weights
};

SolveResult picard_increasing(const Kernel& kernel, const MeasureSpace& space, const Nonlinearity& g,
                              std::span<const double> h, const SolveOptions& options = {});

SolveResult picard_decreasing(const Kernel& kernel, const MeasureSpace& space, const Nonlinearity& g,
                              std::span<const double> h, const SolveOptions& options = {});

/// Fixed point of u = G(u^q sigma) from a positive seed (G1 if empty).
/// Convergence is relative: |T(u) - u| <= tol |u|.
SolveResult homogeneous_picard(const Kernel& kernel, const MeasureSpace& space, double q, std::span<const double> seed,
                               const SolveOptions& options = {});

}  // namespace potlab
