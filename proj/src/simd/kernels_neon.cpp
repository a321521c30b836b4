#include <arm_neon.h>

#include <limits>

#include "potlab/simd.hpp"

namespace potlab::simd::neon {

void rows_dot(const double* a, std::size_t rows, std::size_t n, const double* x, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * n;
        float64x2_t acc0 = vdupq_n_f64(0.0);
        float64x2_t acc1 = vdupq_n_f64(0.0);
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            acc0 = vfmaq_f64(acc0, vld1q_f64(row + j), vld1q_f64(x + j));
            acc1 = vfmaq_f64(acc1, vld1q_f64(row + j + 2), vld1q_f64(x + j + 2));
        }
        double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
        for (; j < n; ++j) acc += row[j] * x[j];
        out[i] = acc;
    }
}

double min_pair_sum(const double* a, const double* b, std::size_t n) {
    float64x2_t best = vdupq_n_f64(std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) best = vminq_f64(best, vaddq_f64(vld1q_f64(a + j), vld1q_f64(b + j)));
    double m = vminvq_f64(best);
    for (; j < n; ++j) {
        const double s = a[j] + b[j];
        if (s < m) m = s;
    }
    return m;
}

}  // namespace potlab::simd::neon
