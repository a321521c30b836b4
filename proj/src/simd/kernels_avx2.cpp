#include <immintrin.h>

#include <limits>

#include "potlab/simd.hpp"

namespace potlab::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmin(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

void rows_dot(const double* a, std::size_t rows, std::size_t n, const double* x, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * n;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4), _mm256_loadu_pd(x + j + 4), acc1);
        }
        if (j + 4 <= n) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
            j += 4;
        }
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; j < n; ++j) acc += row[j] * x[j];
        out[i] = acc;
    }
}

double min_pair_sum(const double* a, const double* b, std::size_t n) {
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        best = _mm256_min_pd(best, _mm256_add_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
    }
    double m = hmin(best);
    for (; j < n; ++j) {
        const double s = a[j] + b[j];
        if (s < m) m = s;
    }
    return m;
}

}  // namespace potlab::simd::avx2
