#include "potlab/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "potlab/extended.hpp"

namespace potlab {

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& a, const std::vector<double>& b,
                      double eps) {
    const std::size_t n = c.size();
    const std::size_t m = b.size();
    if (a.size() != m * n) throw InvalidArgument("solve_lp_max: A has the wrong size");
    for (double v : b) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("solve_lp_max: b must be finite and >= 0");
    }
    for (double v : a) {
        if (!std::isfinite(v)) throw InvalidArgument("solve_lp_max: A must be finite");
    }
    for (double v : c) {
        if (!std::isfinite(v)) throw InvalidArgument("solve_lp_max: c must be finite");
    }

    // Columns: n structural, m slack, then the right-hand side.
    const std::size_t cols = n + m + 1;
    const std::size_t rhs = n + m;
    std::vector<double> t((m + 1) * cols, 0.0);
    auto at = [&](std::size_t r, std::size_t col) -> double& { return t[r * cols + col]; };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) at(i, j) = a[i * n + j];
        at(i, n + i) = 1.0;
        at(i, rhs) = b[i];
    }
    for (std::size_t j = 0; j < n; ++j) at(m, j) = -c[j];

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    LpResult out;
    const std::size_t max_pivots = 100000;
    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < rhs; ++j) {
            if (at(m, j) < -eps) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;

        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double p = at(i, enter);
            if (p <= eps) continue;
            const double ratio = at(i, rhs) / p;
            if (leave == m || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) {
            out.status = LpResult::Status::unbounded;
            out.value = kInf;
            out.ray.assign(n, 0.0);
            if (enter < n) out.ray[enter] = 1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (basis[i] < n) out.ray[basis[i]] = -at(i, enter);
            }
            return out;
        }

        const double p = at(leave, enter);
        for (std::size_t col = 0; col < cols; ++col) at(leave, col) /= p;
        at(leave, enter) = 1.0;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double factor = at(r, enter);
            if (factor == 0.0) continue;
            for (std::size_t col = 0; col < cols; ++col) at(r, col) -= factor * at(leave, col);
            at(r, enter) = 0.0;
        }
        basis[leave] = enter;
        if (++out.pivots > max_pivots) throw NumericalError("solve_lp_max: pivot limit exceeded");
    }

    out.status = LpResult::Status::optimal;
    out.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) out.x[basis[i]] = std::max(0.0, at(i, rhs));
    }
    out.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) out.value += c[j] * out.x[j];
    return out;
}

}  // namespace potlab
