#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "potlab/simd.hpp"

namespace potlab::simd {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::rows_dot, &scalar::min_pair_sum};
#if defined(POTLAB_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::rows_dot, &avx2::min_pair_sum};
#endif
#if defined(POTLAB_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, &neon::rows_dot, &neon::min_pair_sum};
#endif

const KernelTable* best_supported() {
#if defined(POTLAB_HAVE_AVX2)
    if (cpu_supports(Isa::avx2)) return &kAvx2;
#endif
#if defined(POTLAB_HAVE_NEON)
    return &kNeon;
#endif
    return &kScalar;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("POTLAB_SIMD")) {
        const std::string want(env);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (want == name(isa) && compiled(isa) && cpu_supports(isa)) return &table_for(isa);
        }
    }
    return best_supported();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

bool compiled(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
#if defined(POTLAB_HAVE_AVX2)
        case Isa::avx2: return true;
#endif
#if defined(POTLAB_HAVE_NEON)
        case Isa::neon: return true;
#endif
        default: return false;
    }
}

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table_for(Isa isa) {
    switch (isa) {
        case Isa::scalar: return kScalar;
#if defined(POTLAB_HAVE_AVX2)
        case Isa::avx2: return kAvx2;
#endif
#if defined(POTLAB_HAVE_NEON)
        case Isa::neon: return kNeon;
#endif
        default: break;
    }
    throw std::invalid_argument("simd: ISA '" + std::string(name(isa)) + "' not compiled in");
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_active(Isa isa) {
    if (!cpu_supports(isa)) throw std::invalid_argument("simd: CPU lacks " + std::string(name(isa)));
    current().store(&table_for(isa), std::memory_order_release);
}

std::string_view name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

}  // namespace potlab::simd
