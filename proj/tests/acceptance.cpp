// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "potlab/bounds.hpp"
#include "potlab/harness.hpp"
#include "potlab/nonlinearity.hpp"
#include "potlab/principles.hpp"
#include "potlab/solver.hpp"
#include "support.hpp"

using namespace potlab;
using testutil::uniform;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

Vector random_h(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    Vector h(n);
    for (auto& v : h) v = 1.0 + uniform(rng);
    return h;
}

Outcome sharpness() {
    Outcome o;
    const SharpnessResult coarse = sharpness_run(0.9, 1000, 1.0);
    const SharpnessResult fine = sharpness_run(0.9, 1999, 1.0);
    double oracle_gap = 0.0;
    for (std::size_t i = 0; i < coarse.x.size(); ++i) {
        oracle_gap = std::max(oracle_gap, std::abs(coarse.u[i] - std::exp(coarse.x[i])) / std::exp(coarse.x[i]));
    }
    const double ratio = coarse.sup_rel_gap / fine.sup_rel_gap;
    o.require(coarse.violations == 0 && fine.violations == 0, "bound violated on the Volterra grid");
    o.require(coarse.sup_rel_gap <= 2e-3, "sup relative gap above 2e-3");
    o.require(ratio >= 1.8, "halving the step reduced the gap by less than 1.8");
    o.require(oracle_gap <= 2e-3, "Picard solution far from exp(x)");
    o.detail << "gap " << coarse.sup_rel_gap << ", half-step gap " << fine.sup_rel_gap << ", reduction " << ratio
             << ", max |u - e^x|/e^x " << oracle_gap;
    return o;
}

Outcome increasing_sweep() {
    Outcome o;
    std::size_t converged = 0, diverged = 0, other = 0, violations = 0;
    double worst = kInf;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = random_sweep_instance(seed);
        const std::size_t n = inst.space.size();
        const double b = certified_b(quasimetric_constant(inst.kernel));
        for (double q : {0.3, 0.5, 1.0, 1.5, 2.0}) {
            for (int hk = 0; hk < 2; ++hk) {
                const Vector h = hk == 0 ? Vector(n, 1.0) : random_h(seed * 31 + 7, n);
                Vector hq(n);
                for (std::size_t i = 0; i < n; ++i) hq[i] = std::pow(h[i], q);
                const Vector pot = apply(inst.kernel, inst.space, hq);
                const SolveResult sol = picard_increasing(inst.kernel, inst.space, Nonlinearity::power(q), h);
                for (std::size_t i = 0; i < n; ++i) {
                    if (sol.status[i] == PointStatus::diverged) {
                        ++diverged;
                        continue;
                    }
                    if (sol.status[i] != PointStatus::converged) {
                        ++other;
                        continue;
                    }
                    ++converged;
                    const double bound = bounds_with_h(pot[i], h[i], b, q).bound;
                    const double margin = sol.u[i] - bound;
                    worst = std::min(worst, margin / (1.0 + sol.u[i]));
                    if (margin < -1e-9 * (1.0 + sol.u[i])) ++violations;
                }
            }
        }
    }
    o.require(violations == 0, std::to_string(violations) + " negative margins");
    o.require(converged > 0, "no converged points");
    o.detail << converged << " converged points, " << diverged << " diverged, " << other
             << " not converged, min margin/(1+u) " << worst << ", violations " << violations;
    return o;
}

Outcome decreasing_sweep() {
    Outcome o;
    std::size_t positive = 0, none = 0, other = 0, violations = 0, condition_failures = 0;
    double worst = kInf;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = random_sweep_instance(seed);
        const std::size_t n = inst.space.size();
        const double b = certified_b(quasimetric_constant(inst.kernel));
        for (double q : {-0.5, -1.0, -2.0}) {
            for (int hk = 0; hk < 2; ++hk) {
                const Vector h = hk == 0 ? Vector(n, 1.0) : random_h(seed * 31 + 7, n);
                Vector hq(n);
                for (std::size_t i = 0; i < n; ++i) hq[i] = std::pow(h[i], q);
                const Vector pot = apply(inst.kernel, inst.space, hq);
                const SolveResult sol = picard_decreasing(inst.kernel, inst.space, Nonlinearity::power(q), h);
                for (std::size_t i = 0; i < n; ++i) {
                    if (sol.status[i] == PointStatus::no_positive_solution) {
                        ++none;
                        continue;
                    }
                    if (sol.status[i] != PointStatus::converged || !(sol.u[i] > 0.0)) {
                        ++other;
                        continue;
                    }
                    ++positive;
                    const BoundValue v = bounds_with_h(pot[i], h[i], b, q);
                    if (v.condition == Condition::violated) ++condition_failures;
                    const double margin = v.bound - sol.u[i];
                    worst = std::min(worst, margin / (1.0 + sol.u[i]));
                    if (margin < -1e-9 * (1.0 + sol.u[i])) ++violations;
                }
            }
        }
    }
    o.require(violations == 0, std::to_string(violations) + " upper-bound violations");
    o.require(condition_failures == 0, std::to_string(condition_failures) + " necessary-condition failures");
    o.require(positive > 0, "no positive solutions");
    o.detail << positive << " positive converged points, " << none << " without positive solution, " << other
             << " other, min margin/(1+u) " << worst;
    return o;
}

Outcome homogeneous() {
    Outcome o;
    double worst = kInf, worst_scale = 0.0;
    std::size_t points = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Instance inst = random_sweep_instance(1000 + seed);
        const std::size_t n = inst.space.size();
        const double b = certified_b(quasimetric_constant(inst.kernel));
        const Vector g1 = unit_potential(inst.kernel, inst.space);
        for (double q : {0.3, 0.5, 0.7}) {
            const SolveResult sol = homogeneous_picard(inst.kernel, inst.space, q, {});
            const SolveResult sol2 = homogeneous_picard(scale_kernel(inst.kernel, 2.0), inst.space, q, {});
            o.require(sol.all_converged() && sol2.all_converged(), "homogeneous iteration did not converge");
            const double lam = std::pow(2.0, 1.0 / (1.0 - q));
            for (std::size_t i = 0; i < n; ++i) {
                ++points;
                const double bound = homogeneous_sublinear_bound(g1[i], b, q);
                worst = std::min(worst, (sol.u[i] - bound) / (1.0 + sol.u[i]));
                o.require(sol.u[i] - bound >= -1e-9 * (1.0 + sol.u[i]), "homogeneous lower bound violated");
                const double rel = std::abs(sol2.u[i] - lam * sol.u[i]) / (lam * sol.u[i]);
                worst_scale = std::max(worst_scale, rel);
                o.require(rel <= 1e-8, "scaling covariance off by more than 1e-8");
            }
        }
    }
    o.detail << points << " points, min margin/(1+u) " << worst << ", worst scaling error " << worst_scale;
    return o;
}

Outcome exact_constants() {
    Outcome o;
    std::uint64_t fact = 1;
    for (int k = 0; k <= 10; ++k) {
        fact *= static_cast<std::uint64_t>(k + 1);
        const IterationConstant c = iteration_constant(1.0, k);
        o.require(!c.overflow && static_cast<std::uint64_t>(c.value) == fact && c.value == static_cast<double>(fact),
                  "c(1," + std::to_string(k) + ") != " + std::to_string(fact));
    }
    QuasiMetricReport r;
    r.kappa = 1.0;
    o.require(certified_b(r, KernelTransform::plain) == 2.0, "certified b for kappa 1 is not 2");
    o.require(certified_b(r, KernelTransform::w_modified) == 8.0, "w-modified certified b is not 8");
    o.detail << "c(1,10) = " << iteration_constant(1.0, 10).value << ", b = 2 and 8";
    return o;
}

Outcome lemma_oracles() {
    Outcome o;
    std::mt19937_64 rng(2024);
    double lc = kInf;
    for (int trial = 0; trial < 1000; ++trial) {
        const double r = std::array<double, 3>{1.5, 2.0, 3.0}[trial % 3];
        const std::size_t n = 50;
        Vector w(n), f(n);
        for (auto& v : w) v = 0.01 + uniform(rng);
        for (auto& v : f) v = trial % 2 ? std::floor(10.0 * uniform(rng)) : uniform(rng);
        lc = std::min(lc, layer_cake_check(MeasureSpace(w), f, [r](double t) { return std::pow(t, r - 1.0); }).residual);
    }
    o.require(lc >= -1e-9, "layer cake residual below -1e-9");

    double kl = kInf, ps = kInf, pi = kInf;
    std::size_t skipped = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = random_sweep_instance(5000 + seed);
        const std::size_t n = inst.space.size();
        const double b = certified_b(quasimetric_constant(inst.kernel));
        for (std::size_t x = 0; x < n; ++x) {
            kl = std::min(kl, key_lemma_check(inst.kernel, inst.space, b, [](double t) { return t; }, x).residual);
            kl = std::min(kl, key_lemma_check(inst.kernel, inst.space, b, [](double t) { return t * t; }, x).residual);
        }
        const double q = seed % 2 ? 2.0 : 0.5;
        const PsiCheck p = iter_psi_check(inst.kernel, inst.space, Nonlinearity::power(q), b, 4);
        ps = std::min(ps, p.min_residual);
        for (bool s : p.skipped) skipped += s;
        for (double r : {0.5, 2.0, 3.0}) {
            const Vector res = power_iterate_inequality_check(inst.kernel, inst.space, r, b);
            pi = std::min(pi, *std::min_element(res.begin(), res.end()));
        }
    }
    o.require(kl >= -1e-9, "key lemma residual below -1e-9");
    o.require(ps >= -1e-9, "iterated psi residual below -1e-9");
    o.require(pi >= -1e-9, "power iterate residual below -1e-9");
    o.detail << "min residuals: layer cake " << lc << ", key lemma " << kl << ", iter psi " << ps << " (" << skipped
             << " skipped), power iterate " << pi;
    return o;
}

Outcome quasimetric_toolkit() {
    Outcome o;
    double worst_kappa = 0.0, worst_ptolemy = -kInf, worst_w = -kInf;
    auto check_instance = [&](const Kernel& k, double kappa) {
        const double cap = 4.0 * kappa * kappa;
        const double p = ptolemy_constant(k).constant;
        worst_ptolemy = std::max(worst_ptolemy, p - cap);
        o.require(p <= cap, "ptolemy constant above 4 kappa^2");
        if (k.size() <= 30) {
            for (std::size_t w = 0; w < k.size(); ++w) {
                const double kw = quasimetric_constant(modify_w(k, w).kernel).kappa;
                worst_w = std::max(worst_w, kw - cap);
                o.require(kw <= cap + 1e-9, "modified-kernel kappa above 4 kappa^2");
            }
        }
    };
    for (double s : {1.0, 1.5, 2.0}) {
        for (std::size_t n : {3, 5, 9, 17, 30}) {
            Vector xs(n);
            for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i) / static_cast<double>(n - 1);
            const Kernel k = testutil::power_distance_kernel(testutil::line(xs), s);
            const double kappa = quasimetric_constant(k).kappa;
            const double expect = std::pow(2.0, s - 1.0);
            worst_kappa = std::max(worst_kappa, std::abs(kappa - expect));
            o.require(std::abs(kappa - expect) <= 1e-12, "kappa differs from 2^(s-1)");
            check_instance(k, kappa);
        }
        std::mt19937_64 rng(static_cast<std::uint64_t>(s * 100));
        for (int trial = 0; trial < 5; ++trial) {
            const MeasureSpace sp = testutil::random_cloud(rng, 10 + rng() % 21, 2);
            const Kernel k = testutil::power_distance_kernel(sp, s);
            check_instance(k, quasimetric_constant(k).kappa);
        }
    }
    o.detail << "max |kappa - 2^(s-1)| " << worst_kappa << ", max ptolemy - 4 kappa^2 " << worst_ptolemy
             << ", max kappa_w - 4 kappa^2 " << worst_w;
    return o;
}

Outcome wmp_consistency() {
    Outcome o;
    std::mt19937_64 rng(77);
    double worst = -kInf;
    std::size_t kernels = 0, dominations = 0, replays = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng() % 8;
        const MeasureSpace sp = testutil::random_cloud(rng, n, 1 + rng() % 2);
        Kernel k;
        switch (trial % 3) {
            case 0:
                k = testutil::with_finite_diagonal(testutil::power_distance_kernel(sp, 0.5 + 1.5 * uniform(rng)),
                                                   1.0 + 2.0 * uniform(rng));
                break;
            case 1: {
                const int dim = static_cast<int>(sp.dim());
                const double alpha = dim == 1 ? 0.3 + 0.5 * uniform(rng) : 0.5 + uniform(rng);
                k = riesz_kernel(sp, alpha, dim,
                                 DiagonalPolicy::cell_average(riesz_ball_average_diagonal(sp, alpha, dim)));
                break;
            }
            default: {
                const double len = 0.2 + uniform(rng);
                k = radial_kernel(sp, [len](double r) { return std::exp(-r / len); });
            }
        }
        ++kernels;
        const double kappa = quasimetric_constant(k).kappa;
        const WmpReport r = verify_wmp(k, sp, 2.0 * kappa, {WmpStrategy::exhaustive_lp});
        worst = std::max(worst, *r.minimal_b - 2.0 * kappa);
        o.require(*r.minimal_b <= 2.0 * kappa + 1e-9, "exhaustive minimal b above 2 kappa");

        Vector h(n);
        if (trial % 2) {
            for (auto& v : h) v = 0.5 + uniform(rng);
        } else {
            Vector nu(n);
            for (auto& v : nu) v = uniform(rng);
            h = potential(k, nu);
        }
        const double b = 8.0 * kappa * kappa * kappa;
        const WmpReport d = verify_domination(k, sp, h, b, {WmpStrategy::exhaustive_lp});
        if (d.verdict != WmpReport::Verdict::certified) continue;
        ++dominations;
        const MeasureSpace unit(Vector(n, 1.0));
        const WmpReport normalized = verify_wmp(domination_kernel(k, sp, h), unit, b, {WmpStrategy::exhaustive_lp});
        o.require(normalized.verdict == WmpReport::Verdict::certified &&
                      (!normalized.witness || normalized.witness->value <= b + 1e-9),
                  "h-normalized check found a violating witness");
        // Independent replay through the original kernel: Gf <= h on supp f must give Gf <= b h.
        for (int s = 0; s < 500; ++s) {
            Vector f(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (rng() % 2) f[i] = uniform(rng);
            const Vector g = apply(k, sp, f);
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (f[i] > 0.0) scale = std::max(scale, g[i] / h[i]);
            if (!(scale > 0.0) || !std::isfinite(scale)) continue;
            ++replays;
            for (std::size_t i = 0; i < n; ++i) {
                o.require(g[i] / scale <= b * h[i] * (1.0 + 1e-12) + 1e-9, "replayed function breaks domination");
            }
        }
    }
    o.detail << kernels << " kernels, max (minimal b - 2 kappa) " << worst << ", " << dominations
             << " certified dominations, " << replays << " replayed functions";
    return o;
}

Outcome psi_machinery() {
    Outcome o;
    double worst = 0.0;
    std::size_t evaluations = 0;
    for (double q : {0.5, 1.0, 2.0}) {
        for (double b : {1.0, 2.0}) {
            const auto g = Nonlinearity::power(q);
            const double top = q > 1.0 ? 0.95 * b * reciprocal_integral_limit(g) : 5.0 * b;
            for (int i = 0; i <= 40; ++i) {
                const double t = top * i / 40.0;
                const ComparisonLimit c = comparison_limit(g, b, t);
                ++evaluations;
                worst = std::max(worst, c.relative_gap);
                o.require(c.relative_gap <= 1e-8, "closed form and RK4 disagree");
            }
            const ComparisonLadder lad = comparison_ladder(g, b, 8, q > 1.0 ? 0.5 * top : top, 4096);
            for (std::size_t k = 0; k < lad.depth(); ++k) {
                for (std::size_t j = 0; j < lad.valid_nodes[k + 1]; ++j) {
                    o.require(lad.levels[k + 1][j] >= lad.levels[k][j], "ladder not monotone in k");
                }
            }
        }
    }
    o.detail << evaluations << " evaluations, worst relative gap " << worst;
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"sharpness on the Volterra kernel", sharpness},
        {"increasing bound sweep", increasing_sweep},
        {"decreasing bound sweep", decreasing_sweep},
        {"homogeneous sublinear problem", homogeneous},
        {"exact constants", exact_constants},
        {"lemma oracles", lemma_oracles},
        {"quasi-metric toolkit", quasimetric_toolkit},
        {"maximum principle consistency", wmp_consistency},
        {"comparison function cross-check", psi_machinery},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu (%s): %s [%.1fs] %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    secs, o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
