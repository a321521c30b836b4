#include "potlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace potlab {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

double integrate(const ScalarFn& fn, double a, double b) {
    if (a == b) return 0.0;
    static boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate([&fn](double t) { return fn(t); }, a, b, 1e-14);
}

const Vector& sigma_of(const MeasureSpace& space, const SolveOptions& options) {
    if (options.sigma.empty()) return space.weights();
    require(options.sigma.size() == space.size(), "solver: sigma has the wrong length");
    for (double s : options.sigma) require(s >= 0.0 && std::isfinite(s), "solver: sigma must be finite and >= 0");
    return options.sigma;
}

// G(v sigma)
Vector weighted_potential(const Kernel& kernel, const Vector& v, const Vector& sigma) {
    Vector nu(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) nu[j] = ext_mul(v[j], sigma[j]);
    return potential(kernel, nu);
}

void check_h(std::span<const double> h, std::size_t n, bool strictly_positive, const char* who) {
    require(h.size() == n, std::string(who) + ": h has the wrong length");
    for (double v : h) {
        require(std::isfinite(v) && (strictly_positive ? v > 0.0 : v >= 0.0),
                std::string(who) + ": h must be finite and " + (strictly_positive ? "> 0" : ">= 0"));
    }
}

bool close(double next, double cur, double tol) {
    if (std::isinf(next) && std::isinf(cur)) return true;
    return std::abs(next - cur) <= tol * (1.0 + std::abs(cur));
}

constexpr double kMonotoneSlack = 1e-14;

}  // namespace

std::string to_string(PointStatus s) {
    switch (s) {
        case PointStatus::converged: return "converged";
        case PointStatus::diverged: return "diverged";
        case PointStatus::oscillating: return "oscillating";
        case PointStatus::no_positive_solution: return "no_positive_solution";
        case PointStatus::degenerate: return "degenerate";
    }
    return "unknown";
}

bool SolveResult::all_converged() const {
    return std::all_of(status.begin(), status.end(), [](PointStatus s) { return s == PointStatus::converged; });
}

std::size_t SolveResult::count(PointStatus s) const {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

IterationTrace iterate_f(const Kernel& kernel, const MeasureSpace& space, const ScalarFn& phi, std::size_t depth) {
    const std::size_t n = kernel.size();
    require(space.size() == n, "iterate_f: kernel and space sizes differ");
    IterationTrace trace;
    trace.domain_exit.assign(n, false);
    trace.levels.push_back(apply(kernel, space, Vector(n, 1.0)));
    for (std::size_t k = 0; k < depth; ++k) {
        const Vector& f = trace.levels.back();
        Vector p(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = phi(f[i]);
            if (std::isnan(v) || v < 0.0) {
                trace.domain_exit[i] = true;
                if (!trace.first_exit_level) trace.first_exit_level = k;
                p[i] = 0.0;
            } else {
                p[i] = v;
            }
        }
        trace.levels.push_back(apply(kernel, space, p));
    }
    return trace;
}

InequalityCheck layer_cake_check(const MeasureSpace& omega, std::span<const double> f, const ScalarFn& phi) {
    const std::size_t n = omega.size();
    require(f.size() == n, "layer_cake_check: f has the wrong length");
    for (double v : f) require(!std::isnan(v), "layer_cake_check: f must not be NaN");
    const Vector& w = omega.weights();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });

    InequalityCheck out;
    std::size_t i = 0;
    double below = 0.0;
    while (i < n) {
        std::size_t j = i;
        double tie_mass = 0.0;
        while (j < n && f[order[j]] == f[order[i]]) tie_mass += w[order[j++]];
        below += tie_mass;
        out.rhs += ext_mul(phi(below), tie_mass);
        i = j;
    }
    out.lhs = integrate(phi, 0.0, omega.total_mass());
    out.residual = out.rhs - out.lhs;
    return out;
}

InequalityCheck key_lemma_check(const Kernel& kernel, const MeasureSpace& space, double b, const ScalarFn& phi,
                                std::size_t x) {
    const std::size_t n = kernel.size();
    require(space.size() == n && x < n, "key_lemma_check: bad sizes or point index");
    require(b >= 1.0, "key_lemma_check: b must be >= 1");
    const Vector g1 = apply(kernel, space, Vector(n, 1.0));
    const double a = g1[x];
    require(std::isfinite(a), "key_lemma_check: G1(x) must be finite");
    InequalityCheck out;
    out.lhs = integrate(phi, 0.0, a);
    for (std::size_t j = 0; j < n; ++j) {
        const double kw = ext_mul(kernel(x, j), space.weight(j));
        if (kw == 0.0) continue;
        out.rhs += ext_mul(kw, phi(std::min(b * g1[j], a)));
    }
    out.residual = out.rhs - out.lhs;
    return out;
}

PsiCheck iter_psi_check(const Kernel& kernel, const MeasureSpace& space, const Nonlinearity& g, double b,
                        std::size_t depth, std::size_t grid_size) {
    const std::size_t n = kernel.size();
    const bool up = g.increasing();
    const ScalarFn phi = [&g, up](double t) {
        if (up) return g(t + 1.0);
        return t <= 1.0 ? g(1.0 - t) : std::nan("");
    };
    const IterationTrace trace = iterate_f(kernel, space, phi, depth);
    const Vector& f0 = trace.levels.front();
    double t_max = 0.0;
    for (double v : f0) {
        if (std::isfinite(v)) t_max = std::max(t_max, v);
    }
    if (t_max == 0.0) t_max = 1.0;
    const ComparisonLadder ladder = comparison_ladder(g, b, depth, t_max, grid_size);

    PsiCheck out;
    out.residuals.assign(depth + 1, Vector(n, std::nan("")));
    out.skipped.assign(n, false);
    out.min_residual = kInf;
    for (std::size_t k = 0; k <= depth; ++k) {
        const bool contaminated = trace.first_exit_level && k > *trace.first_exit_level;
        for (std::size_t x = 0; x < n; ++x) {
            const double psi = std::isfinite(f0[x]) ? ladder.value(k, f0[x]) : std::nan("");
            if (contaminated || std::isnan(psi)) {
                out.skipped[x] = true;
                continue;
            }
            const double r = trace.levels[k][x] - psi;
            out.residuals[k][x] = r;
            out.min_residual = std::min(out.min_residual, r);
        }
    }
    return out;
}

SolveResult picard_increasing(const Kernel& kernel, const MeasureSpace& space, const Nonlinearity& g,
                              std::span<const double> h, const SolveOptions& options) {
    const std::size_t n = kernel.size();
    require(space.size() == n, "picard_increasing: kernel and space sizes differ");
    require(g.increasing(), "picard_increasing: needs an increasing nonlinearity");
    check_h(h, n, false, "picard_increasing");
    const Vector& sigma = sigma_of(space, options);

    SolveResult out;
    Vector u(h.begin(), h.end());
    Vector gu(n);
    std::vector<bool> ok(n, false);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        for (std::size_t j = 0; j < n; ++j) gu[j] = g(u[j]);
        Vector next = weighted_potential(kernel, gu, sigma);
        bool done = true;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] += h[i];
            if (next[i] > options.ceiling) next[i] = kInf;
            if (next[i] < u[i] - kMonotoneSlack * std::abs(u[i]) || std::isnan(next[i])) {
                throw NumericalError("picard_increasing: iterates failed to be nondecreasing");
            }
            ok[i] = close(next[i], u[i], options.tol);
            done = done && ok[i];
        }
        out.iterations = it;
        if (done || it == options.max_iter) {
            out.status.assign(n, PointStatus::oscillating);
            out.defect.assign(n, kInf);
            for (std::size_t i = 0; i < n; ++i) {
                if (std::isfinite(next[i])) out.defect[i] = std::abs(next[i] - u[i]);
                if (std::isinf(u[i]) || std::isinf(next[i])) {
                    out.status[i] = PointStatus::diverged;
                    u[i] = kInf;
                } else if (ok[i]) {
                    out.status[i] = PointStatus::converged;
                    out.residual = std::max(out.residual, std::abs(next[i] - u[i]));
                }
            }
            out.u = std::move(u);
            return out;
        }
        u = std::move(next);
    }
    out.u = std::move(u);
    out.status.assign(n, PointStatus::oscillating);
    return out;
}

SolveResult picard_decreasing(const Kernel& kernel, const MeasureSpace& space, const Nonlinearity& g,
                              std::span<const double> h, const SolveOptions& options) {
    const std::size_t n = kernel.size();
    require(space.size() == n, "picard_decreasing: kernel and space sizes differ");
    require(!g.increasing(), "picard_decreasing: needs a decreasing nonlinearity");
    require(options.theta > 0.0 && options.theta <= 1.0, "picard_decreasing: theta must lie in (0, 1]");
    check_h(h, n, true, "picard_decreasing");
    const Vector& sigma = sigma_of(space, options);
    const double theta = options.theta;

    // T(u) = h - G(g(u) sigma) is order preserving, and T(h) <= h, so the
    // iterates decrease to the largest solution below h when one is positive.
    SolveResult out;
    Vector u(h.begin(), h.end());
    Vector gu(n);
    std::vector<bool> ok(n, false);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        for (std::size_t j = 0; j < n; ++j) gu[j] = g(u[j]);
        const Vector pot = weighted_potential(kernel, gu, sigma);
        Vector next(n);
        bool done = true;
        bool lost_positivity = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = h[i] - pot[i];
            ok[i] = close(t, u[i], options.tol);
            done = done && ok[i];
            next[i] = (1.0 - theta) * u[i] + theta * t;
            if (!(next[i] > 0.0)) {
                lost_positivity = true;
            } else if (next[i] > u[i] + kMonotoneSlack * std::abs(u[i])) {
                throw NumericalError("picard_decreasing: iterates failed to be nonincreasing");
            }
        }
        out.iterations = it;
        if (done) {
            out.status.assign(n, PointStatus::converged);
            out.defect.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                out.defect[i] = std::abs(h[i] - pot[i] - u[i]);
                out.residual = std::max(out.residual, out.defect[i]);
            }
            out.u = std::move(u);
            return out;
        }
        if (lost_positivity) {
            // Every positive solution lies below every iterate, so none exists.
            out.status.assign(n, PointStatus::no_positive_solution);
            out.defect.assign(n, kInf);
            out.u = std::move(next);
            return out;
        }
        if (it == options.max_iter) {
            out.status.assign(n, PointStatus::oscillating);
            out.defect.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                out.defect[i] = std::abs(h[i] - pot[i] - u[i]);
                if (ok[i]) out.status[i] = PointStatus::converged;
            }
            out.u = std::move(u);
            return out;
        }
        u = std::move(next);
    }
    out.u = std::move(u);
    out.status.assign(n, PointStatus::oscillating);
    return out;
}

SolveResult homogeneous_picard(const Kernel& kernel, const MeasureSpace& space, double q, std::span<const double> seed,
                               const SolveOptions& options) {
    const std::size_t n = kernel.size();
    require(space.size() == n, "homogeneous_picard: kernel and space sizes differ");
    require(q > 0.0 && q < 1.0, "homogeneous_picard: q must lie in (0, 1)");
    const Vector& sigma = sigma_of(space, options);
    const Vector g1 = potential(kernel, sigma);

    SolveResult out;
    out.status.assign(n, PointStatus::converged);
    std::vector<bool> live(n);
    for (std::size_t i = 0; i < n; ++i) live[i] = g1[i] > 0.0;

    Vector u(n, 0.0);
    if (seed.empty()) {
        for (std::size_t i = 0; i < n; ++i) u[i] = live[i] ? g1[i] : 0.0;
    } else {
        require(seed.size() == n, "homogeneous_picard: seed has the wrong length");
        for (std::size_t i = 0; i < n; ++i) {
            require(seed[i] > 0.0 && std::isfinite(seed[i]), "homogeneous_picard: seed must be positive and finite");
            u[i] = live[i] ? seed[i] : 0.0;
        }
    }
    if (std::none_of(live.begin(), live.end(), [](bool b) { return b; })) {
        out.status.assign(n, PointStatus::degenerate);
        out.defect.assign(n, 0.0);
        out.u = std::move(u);
        return out;
    }

    Vector p(n);
    std::vector<bool> ok(n, false);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        for (std::size_t j = 0; j < n; ++j) p[j] = std::pow(u[j], q);
        const Vector next = weighted_potential(kernel, p, sigma);
        bool done = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!live[i]) continue;
            if (next[i] == 0.0 || std::isinf(next[i]) || next[i] > options.ceiling) {
                ok[i] = true;
                live[i] = false;
                out.status[i] = next[i] == 0.0 ? PointStatus::degenerate : PointStatus::diverged;
                u[i] = next[i] == 0.0 ? 0.0 : kInf;
                continue;
            }
            ok[i] = std::abs(next[i] - u[i]) <= options.tol * u[i];
            done = done && ok[i];
        }
        out.iterations = it;
        if (done || it == options.max_iter) {
            out.defect.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (std::isfinite(next[i]) && std::isfinite(u[i])) out.defect[i] = std::abs(next[i] - u[i]);
                if (g1[i] == 0.0) {
                    out.status[i] = PointStatus::degenerate;
                } else if (live[i]) {
                    out.status[i] = ok[i] ? PointStatus::converged : PointStatus::oscillating;
                    if (ok[i]) out.residual = std::max(out.residual, std::abs(next[i] - u[i]));
                } else if (out.status[i] == PointStatus::degenerate) {
                    u[i] = 0.0;
                } else {
                    u[i] = kInf;
                }
            }
            out.u = std::move(u);
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (live[i]) u[i] = next[i];
        }
    }
    out.u = std::move(u);
    return out;
}

}  // namespace potlab
