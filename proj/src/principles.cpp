#include "potlab/principles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "potlab/simd.hpp"
#include "potlab/simplex.hpp"

namespace potlab {

namespace {

constexpr double kSlack = 1e-9;

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

Vector reciprocal_matrix(const Kernel& kernel) {
    Vector d(kernel.entries().size());
    std::transform(kernel.entries().begin(), kernel.entries().end(), d.begin(), ext_recip);
    return d;
}

// Ratio with the conventions of the quasi-metric scan: a vanishing numerator
// or an infinite denominator gives 0.
double ratio(double num, double den) {
    if (num == 0.0 || std::isinf(den)) return 0.0;
    if (den == 0.0) return kInf;
    return num / den;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Scale f so that max over the support of Gf is at most 1, then record Gf(x).
WmpWitness replayable_witness(const Kernel& kernel, const MeasureSpace& space, std::vector<std::size_t> support,
                              Vector f, std::size_t x) {
    Vector gf = apply(kernel, space, f);
    double m = 0.0;
    for (std::size_t i : support) m = std::max(m, gf[i]);
    if (m > 1.0) {
        for (double& v : f) v /= m;
        gf = apply(kernel, space, f);
        double m2 = 0.0;
        for (std::size_t i : support) m2 = std::max(m2, gf[i]);
        if (m2 > 1.0) {
            for (double& v : f) v *= 1.0 - 8.0 * std::numeric_limits<double>::epsilon();
            gf = apply(kernel, space, f);
        }
    }
    WmpWitness w;
    w.support = std::move(support);
    w.f = std::move(f);
    w.x = x;
    w.value = gf[x];
    return w;
}

WmpReport exhaustive(const Kernel& kernel, const MeasureSpace& space, double b) {
    const std::size_t n = kernel.size();
    require(n <= kExhaustiveLimit, "verify_wmp: exhaustive strategy needs n <= 16");
    Vector a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = ext_mul(kernel(i, j), space.weight(j));
    }

    WmpReport report;
    report.strategy = WmpStrategy::exhaustive_lp;
    report.b_tested = b;
    double best = 0.0;
    std::optional<WmpWitness> best_witness;
    std::vector<std::size_t> support;
    std::vector<std::size_t> kept;
    Vector rows;
    Vector c;
    const Vector ones_rhs(n, 1.0);

    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        support.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (mask & (1u << j)) support.push_back(j);
        }
        // A variable whose column is infinite somewhere on S must vanish.
        kept.clear();
        for (std::size_t j : support) {
            bool finite = true;
            for (std::size_t i : support) finite = finite && std::isfinite(a[i * n + j]);
            if (finite) kept.push_back(j);
        }
        const std::size_t m = support.size();
        const std::size_t k = kept.size();
        rows.assign(m * k, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t s = 0; s < k; ++s) rows[r * k + s] = a[support[r] * n + kept[s]];
        }
        const Vector rhs(m, 1.0);

        for (std::size_t x = 0; x < n; ++x) {
            if (mask & (1u << x)) continue;
            ++report.problems;
            c.assign(k, 0.0);
            std::size_t infinite_at = k;
            bool any = false;
            for (std::size_t s = 0; s < k; ++s) {
                c[s] = a[x * n + kept[s]];
                if (std::isinf(c[s])) infinite_at = s;
                any = any || c[s] > 0.0;
            }
            if (!any) continue;

            double value = 0.0;
            Vector f(n, 0.0);
            if (infinite_at < k) {
                double col_max = 0.0;
                for (std::size_t r = 0; r < m; ++r) col_max = std::max(col_max, rows[r * k + infinite_at]);
                f[kept[infinite_at]] = col_max > 0.0 ? 1.0 / col_max : 1.0;
                value = kInf;
            } else {
                const LpResult lp = solve_lp_max(c, rows, rhs);
                if (lp.status == LpResult::Status::unbounded) {
                    double along = 0.0;
                    for (std::size_t s = 0; s < k; ++s) along += c[s] * lp.ray[s];
                    const double scale = along > 0.0 ? 2.0 * std::max(b, 1.0) / along : 1.0;
                    for (std::size_t s = 0; s < k; ++s) f[kept[s]] = std::max(0.0, lp.ray[s]) * scale;
                    value = kInf;
                } else {
                    for (std::size_t s = 0; s < k; ++s) f[kept[s]] = lp.x[s];
                    value = lp.value;
                }
            }
            if (value > best) {
                best = value;
                best_witness = replayable_witness(kernel, space, support, std::move(f), x);
            }
        }
    }

    report.minimal_b = std::max(1.0, best);
    report.b_lower_witness = *report.minimal_b;
    report.witness = std::move(best_witness);
    report.verdict = best > b + kSlack ? WmpReport::Verdict::violated : WmpReport::Verdict::certified;
    return report;
}

WmpReport randomized(const Kernel& kernel, const MeasureSpace& space, double b, const WmpOptions& options) {
    const std::size_t n = kernel.size();
    WmpReport report;
    report.strategy = WmpStrategy::randomized;
    report.b_tested = b;
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(n);
    double best = 1.0;
    std::optional<WmpWitness> best_witness;

    const std::size_t total = std::max(options.budget, n);
    for (std::size_t t = 0; t < total; ++t) {
        std::vector<std::size_t> support;
        Vector f(n, 0.0);
        if (t < n) {
            support.push_back(t);
            f[t] = 1.0;
        } else {
            // Small supports are the informative ones; bias the size downward.
            const double u = uniform(rng);
            const std::size_t size = 1 + static_cast<std::size_t>(u * u * static_cast<double>(n - 1) + 0.5);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            for (std::size_t i = 0; i < size; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(uniform(rng) * static_cast<double>(n - i));
                std::swap(order[i], order[std::min(j, n - 1)]);
                support.push_back(order[i]);
                f[order[i]] = uniform(rng) < 0.2 ? std::exp(8.0 * uniform(rng) - 4.0) : 1e-3 + uniform(rng);
            }
            std::sort(support.begin(), support.end());
        }
        ++report.problems;

        const Vector gf = apply(kernel, space, f);
        std::vector<bool> in_support(n, false);
        double m = 0.0;
        for (std::size_t i : support) {
            in_support[i] = true;
            m = std::max(m, gf[i]);
        }
        if (std::isinf(m)) continue;
        for (std::size_t x = 0; x < n; ++x) {
            if (in_support[x] || gf[x] == 0.0) continue;
            const double r = m == 0.0 ? kInf : gf[x] / m;
            if (r > best) {
                best = r;
                Vector g = f;
                const double scale = m > 0.0 ? 1.0 / m : (std::isinf(gf[x]) ? 1.0 : 2.0 * std::max(b, 1.0) / gf[x]);
                for (double& v : g) v *= scale;
                best_witness = replayable_witness(kernel, space, support, std::move(g), x);
            }
        }
    }
    report.b_lower_witness = best;
    report.witness = std::move(best_witness);
    report.verdict = best > b + kSlack ? WmpReport::Verdict::violated : WmpReport::Verdict::satisfied_on_tests;
    return report;
}

}  // namespace

QuasiMetricReport quasimetric_constant(const Kernel& kernel) {
    require(kernel.symmetric(), "quasimetric_constant: kernel must be symmetric");
    const std::size_t n = kernel.size();
    QuasiMetricReport report;
    report.vacuous = n < 3;
    if (n < 2) return report;

    const Vector d = reciprocal_matrix(kernel);
    const auto& table = simd::active();
    auto min_excluding = [&](std::size_t x, std::size_t y) {
        const double* dx = d.data() + x * n;
        const double* dy = d.data() + y * n;
        const std::size_t lo = std::min(x, y);
        const std::size_t hi = std::max(x, y);
        double m = table.min_pair_sum(dx, dy, lo);
        if (hi > lo + 1) m = std::min(m, table.min_pair_sum(dx + lo + 1, dy + lo + 1, hi - lo - 1));
        if (n > hi + 1) m = std::min(m, table.min_pair_sum(dx + hi + 1, dy + hi + 1, n - hi - 1));
        return m;
    };

    double best = -1.0;
    std::size_t bx = 0, by = 0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x; y < n; ++y) {
            const double dxy = d[x * n + y];
            if (dxy == 0.0) continue;
            const double r = ratio(dxy, min_excluding(x, y));
            if (r > best) {
                best = r;
                bx = x;
                by = y;
            }
        }
    }
    if (best > 0.5) {
        report.kappa = best;
        std::size_t bz = n;
        double den = kInf;
        for (std::size_t z = 0; z < n; ++z) {
            if (z == bx || z == by) continue;
            const double s = d[bx * n + z] + d[by * n + z];
            if (bz == n || s < den) {
                den = s;
                bz = z;
            }
        }
        report.witness_triple = {bx, by, bz};
    }
    return report;
}

PtolemyReport ptolemy_constant(const Kernel& kernel) {
    require(kernel.symmetric(), "ptolemy_constant: kernel must be symmetric");
    const std::size_t n = kernel.size();
    PtolemyReport report;
    report.vacuous = n < 4;
    if (n < 4) return report;
    const Vector d = reciprocal_matrix(kernel);
    auto dd = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                for (std::size_t l = k + 1; l < n; ++l) {
                    const double p1 = ext_mul(dd(i, j), dd(k, l));
                    const double p2 = ext_mul(dd(i, k), dd(j, l));
                    const double p3 = ext_mul(dd(i, l), dd(j, k));
                    const double r1 = ratio(p1, p2 + p3);
                    const double r2 = ratio(p2, p1 + p3);
                    const double r3 = ratio(p3, p1 + p2);
                    if (r1 > report.constant) {
                        report.constant = r1;
                        report.witness_quadruple = {i, j, k, l};
                    }
                    if (r2 > report.constant) {
                        report.constant = r2;
                        report.witness_quadruple = {i, k, j, l};
                    }
                    if (r3 > report.constant) {
                        report.constant = r3;
                        report.witness_quadruple = {i, l, j, k};
                    }
                }
            }
        }
    }
    return report;
}

double certified_b(const QuasiMetricReport& report, KernelTransform transform) {
    const double k = report.kappa;
    return transform == KernelTransform::plain ? 2.0 * k : 8.0 * k * k * k;
}

std::string to_string(WmpReport::Verdict verdict) {
    switch (verdict) {
        case WmpReport::Verdict::certified: return "certified";
        case WmpReport::Verdict::satisfied_on_tests: return "satisfied_on_tests";
        case WmpReport::Verdict::violated: return "violated";
    }
    return "unknown";
}

std::string to_string(WmpStrategy strategy) {
    switch (strategy) {
        case WmpStrategy::exhaustive_lp: return "exhaustive_lp";
        case WmpStrategy::randomized: return "randomized";
        case WmpStrategy::automatic: return "automatic";
    }
    return "unknown";
}

WmpReport verify_wmp(const Kernel& kernel, const MeasureSpace& space, double b, const WmpOptions& options) {
    require(kernel.size() == space.size(), "verify_wmp: kernel and space sizes differ");
    require(b >= 1.0, "verify_wmp: b must be >= 1");
    WmpStrategy s = options.strategy;
    if (s == WmpStrategy::automatic) {
        s = kernel.size() <= kExhaustiveLimit ? WmpStrategy::exhaustive_lp : WmpStrategy::randomized;
    }
    return s == WmpStrategy::exhaustive_lp ? exhaustive(kernel, space, b) : randomized(kernel, space, b, options);
}

Kernel domination_kernel(const Kernel& kernel, const MeasureSpace& space, std::span<const double> h) {
    const std::size_t n = kernel.size();
    require(space.size() == n && h.size() == n, "domination_kernel: size mismatch");
    for (double v : h) require(v > 0.0 && std::isfinite(v), "domination_kernel: h must be positive and finite");
    Vector e(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) e[i * n + j] = ext_mul(kernel(i, j), space.weight(j)) / h[i];
    }
    return Kernel(n, std::move(e), false, kernel.name() + "/dom");
}

WmpReport verify_domination(const Kernel& kernel, const MeasureSpace& space, std::span<const double> h, double b,
                            const WmpOptions& options) {
    const Kernel normalized = domination_kernel(kernel, space, h);
    const MeasureSpace unit(Vector(kernel.size(), 1.0));
    return verify_wmp(normalized, unit, b, options);
}

double mutual_energy(const Kernel& kernel, const Measure& mu, const Measure& nu) {
    const std::size_t n = kernel.size();
    require(mu.size() == n && nu.size() == n, "mutual_energy: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mu[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) total += ext_mul(mu[i], ext_mul(kernel(i, j), nu[j]));
    }
    return total;
}

}  // namespace potlab
