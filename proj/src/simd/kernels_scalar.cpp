#include <limits>

#include "potlab/simd.hpp"

namespace potlab::simd::scalar {

void rows_dot(const double* a, std::size_t rows, std::size_t n, const double* x, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        out[i] = acc;
    }
}

double min_pair_sum(const double* a, const double* b, std::size_t n) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double s = a[j] + b[j];
        if (s < best) best = s;
    }
    return best;
}

}  // namespace potlab::simd::scalar
