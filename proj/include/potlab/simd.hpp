#pragma once

// Data-parallel inner loops with a scalar reference and vectorized variants
// (AVX2+FMA on x86-64, NEON on aarch64) picked once at startup.
//
// The vector variants reassociate sums. All summands are nonnegative here, so
// they agree with the scalar reference to n * eps relative; the equivalence
// tests pin that. Inputs must be finite: callers route +inf through the
// scalar path.

#include <cstddef>
#include <string_view>

namespace potlab::simd {

enum class Isa { scalar, avx2, neon };

/// out[i] = sum_j a[i * n + j] * x[j] for i < rows.
using RowsDotFn = void (*)(const double* a, std::size_t rows, std::size_t n, const double* x, double* out);
/// min_j (a[j] + b[j]); +inf for n == 0.
using MinPairSumFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
    Isa isa;
    RowsDotFn rows_dot;
    MinPairSumFn min_pair_sum;
};

/// Table for a specific ISA; throws if that ISA was not compiled in.
const KernelTable& table_for(Isa isa);
bool compiled(Isa isa) noexcept;
bool cpu_supports(Isa isa) noexcept;

/// Active table. Selected on first use: the best ISA the CPU supports, unless
/// the POTLAB_SIMD environment variable names one ("scalar", "avx2", "neon").
const KernelTable& active();
/// Force an ISA for the rest of the process (tests, benchmarking).
void set_active(Isa isa);

std::string_view name(Isa isa) noexcept;

namespace scalar {
void rows_dot(const double* a, std::size_t rows, std::size_t n, const double* x, double* out);
double min_pair_sum(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
void rows_dot(const double* a, std::size_t rows, std::size_t n, const double* x, double* out);
double min_pair_sum(const double* a, const double* b, std::size_t n);
}  // namespace avx2

namespace neon {
void rows_dot(const double* a, std::size_t rows, std::size_t n, const double* x, double* out);
double min_pair_sum(const double* a, const double* b, std::size_t n);
}  // namespace neon

}  // namespace potlab::simd
