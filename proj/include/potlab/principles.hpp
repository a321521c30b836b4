#pragma once

// Kernel-side hypotheses behind every bound: the weak maximum principle
//
//   Gf <= 1 on {f > 0}  ==>  Gf <= b everywhere,
//
// the weak domination principle (1 replaced by a weight h), the quasi-metric
// constant of d = 1/K, the Ptolemy constant, and mutual energy.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potlab/measure_kernel.hpp"

namespace potlab {

struct QuasiMetricReport {
    /// max d(x,y) / (d(x,z) + d(y,z)) over z outside {x, y}, floored at 1/2.
    /// The degenerate triples x = y are included, so a finite diagonal counts.
    double kappa = 0.5;
    std::array<std::size_t, 3> witness_triple{0, 0, 0};
    bool vacuous = false;  // fewer than three points
};

/// Exhaustive O(n^3) scan. Requires a symmetric kernel.
QuasiMetricReport quasimetric_constant(const Kernel& kernel);

struct PtolemyReport {
    double constant = 0.0;
    std::array<std::size_t, 4> witness_quadruple{0, 0, 0, 0};
    bool vacuous = false;  // fewer than four points
};

/// max d(x,y) d(z,w) / (d(x,w) d(y,z) + d(x,z) d(y,w)) over distinct quadruples.
PtolemyReport ptolemy_constant(const Kernel& kernel);

enum class KernelTransform { plain, w_modified };

/// 2 kappa for the kernel itself, 8 kappa^3 for a K_w built from it.
double certified_b(const QuasiMetricReport& report, KernelTransform transform = KernelTransform::plain);

enum class WmpStrategy { exhaustive_lp, randomized, automatic };

struct WmpOptions {
    WmpStrategy strategy = WmpStrategy::automatic;
    std::size_t budget = 20000;  // randomized samples
    std::uint64_t seed = 1;
};

struct WmpWitness {
    std::vector<std::size_t> support;
    Vector f;  // full length, zero off the support
    std::size_t x = 0;
    double value = 0.0;  // (Gf)(x), with max over the support of Gf <= 1
};

struct WmpReport {
    enum class Verdict { certified, satisfied_on_tests, violated };
    Verdict verdict = Verdict::satisfied_on_tests;
    WmpStrategy strategy = WmpStrategy::randomized;
    double b_tested = 1.0;
    double b_lower_witness = 1.0;     // largest ratio found
    std::optional<double> minimal_b;  // exhaustive strategy only
    std::optional<WmpWitness> witness;  // attains b_lower_witness; a certificate when violated
    std::size_t problems = 0;  // LPs solved or samples drawn
};

std::string to_string(WmpReport::Verdict verdict);
std::string to_string(WmpStrategy strategy);

inline constexpr std::size_t kExhaustiveLimit = 16;

/// Exhaustive: one LP per nonempty support S and point x outside it. Needs n <= 16.
WmpReport verify_wmp(const Kernel& kernel, const MeasureSpace& space, double b, const WmpOptions& options = {});

/// Gf <= h on {f > 0} ==> Gf <= b h, checked as the WMP of K_ij w_j / h_i
/// with unit weights. Witnesses are expressed in that normalized form.
WmpReport verify_domination(const Kernel& kernel, const MeasureSpace& space, std::span<const double> h, double b,
                            const WmpOptions& options = {});

/// Kernel whose WMP with unit weights is the domination principle for (K, h).
Kernel domination_kernel(const Kernel& kernel, const MeasureSpace& space, std::span<const double> h);

/// sum_ij mu_i K_ij nu_j.
double mutual_energy(const Kernel& kernel, const Measure& mu, const Measure& nu);

}  // namespace potlab
