#pragma once

// Dense tableau simplex for  max c.x  s.t.  A x <= b, x >= 0  with b >= 0,
// so the origin is a feasible starting basis. Bland's rule on both the
// entering and the leaving variable, hence no cycling.

#include <cstddef>
#include <vector>

namespace potlab {

struct LpResult {
    enum class Status { optimal, unbounded };
    Status status = Status::optimal;
    double value = 0.0;
    std::vector<double> x;    // optimal point (optimal status)
    std::vector<double> ray;  // x + t * ray stays feasible, objective grows (unbounded status)
    std::size_t pivots = 0;
};

/// A is row-major m x n. Entries must be finite; b >= 0.
LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& a, const std::vector<double>& b,
                      double eps = 1e-9);

}  // namespace potlab
