#include "potlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace potlab {

namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kTailIncrement = 1e-12;
constexpr double kHorizon = 1e12;

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

double integrate(const ScalarFn& integrand, double a, double b) {
    if (a == b) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 31>::integrate(integrand, a, b, 20, kQuadTol);
}

double reciprocal(const Nonlinearity& g, double s) {
    const double v = g(s);
    return std::isinf(v) ? 0.0 : 1.0 / v;
}

double interpolate(const Vector& t, const Vector& g, double x, bool extrapolate_right) {
    if (x <= t.front()) return g.front();
    if (x >= t.back()) {
        if (!extrapolate_right || t.size() < 2) return g.back();
        const std::size_t m = t.size() - 1;
        const double slope = (g[m] - g[m - 1]) / (t[m] - t[m - 1]);
        return g[m] + slope * (x - t[m]);
    }
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double frac = (x - t[lo]) / (t[hi] - t[lo]);
    return g[lo] + frac * (g[hi] - g[lo]);
}

void validate_table(const Vector& t, const Vector& g, bool increasing) {
    require(t.size() >= 2 && t.size() == g.size(), "tabulated nonlinearity: need >= 2 matching nodes");
    for (std::size_t i = 1; i < t.size(); ++i) {
        require(t[i] > t[i - 1], "tabulated nonlinearity: nodes must be strictly increasing");
        if (increasing) {
            require(g[i] >= g[i - 1], "tabulated nonlinearity: values must be nondecreasing");
        } else {
            require(g[i] <= g[i - 1], "tabulated nonlinearity: values must be nonincreasing");
        }
    }
    for (double v : g) require(!std::isnan(v) && v > 0.0, "tabulated nonlinearity: values must be positive");
    if (increasing) {
        require(t.front() <= 1.0, "tabulated nonlinearity: increasing table must start at or below 1");
    } else {
        require(t.front() >= 0.0 && t.back() >= 1.0, "tabulated nonlinearity: decreasing table must cover up to 1");
    }
}

void spot_check_monotone(const ScalarFn& fn, bool increasing) {
    double prev = increasing ? fn(1.0) : fn(1e-9);
    for (int i = 1; i <= 200; ++i) {
        const double s = increasing ? std::pow(10.0, 6.0 * i / 200.0) : 1e-9 + (1.0 - 1e-9) * i / 200.0;
        const double v = fn(s);
        require(!std::isnan(v), "nonlinearity: NaN on its domain");
        if (increasing) {
            require(v >= prev, "nonlinearity: not nondecreasing on [1, inf)");
        } else {
            require(v <= prev, "nonlinearity: not nonincreasing on (0, 1]");
        }
        prev = v;
    }
}

// 1 + (1 - q) tau raised to 1 / (1 - q), stable as q -> 1.
double power_inverse(double q, double tau, double sign) {
    const double e = 1.0 - q;
    return std::exp(std::log1p(sign * e * tau) / e);
}

}  // namespace

Nonlinearity Nonlinearity::power(double q) {
    require(std::isfinite(q) && q != 0.0, "Nonlinearity::power: q must be finite and nonzero");
    Nonlinearity g;
    g.kind_ = q > 0.0 ? Kind::power_increasing : Kind::power_decreasing;
    g.q_ = q;
    g.label_ = "power";
    return g;
}

Nonlinearity Nonlinearity::general_increasing(ScalarFn fn, std::string label) {
    require(static_cast<bool>(fn), "Nonlinearity: empty function");
    require(fn(1.0) >= 1.0, "Nonlinearity: g(1) must be >= 1");
    spot_check_monotone(fn, true);
    Nonlinearity g;
    g.kind_ = Kind::general_increasing;
    g.q_ = std::nan("");
    g.fn_ = std::move(fn);
    g.label_ = std::move(label);
    return g;
}

Nonlinearity Nonlinearity::general_decreasing(ScalarFn fn, std::string label) {
    require(static_cast<bool>(fn), "Nonlinearity: empty function");
    require(fn(1.0) >= 1.0, "Nonlinearity: g(1) must be >= 1");
    spot_check_monotone(fn, false);
    Nonlinearity g;
    g.kind_ = Kind::general_decreasing;
    g.q_ = std::nan("");
    g.fn_ = std::move(fn);
    g.label_ = std::move(label);
    return g;
}

Nonlinearity Nonlinearity::tabulated_increasing(Vector t, Vector gv) {
    validate_table(t, gv, true);
    require(interpolate(t, gv, 1.0, true) >= 1.0, "Nonlinearity: g(1) must be >= 1");
    Nonlinearity g;
    g.kind_ = Kind::general_increasing;
    g.q_ = std::nan("");
    g.fn_ = [t, gv](double x) { return interpolate(t, gv, x, true); };
    g.label_ = "tabulated";
    g.table_ = std::make_pair(std::move(t), std::move(gv));
    return g;
}

Nonlinearity Nonlinearity::tabulated_decreasing(Vector t, Vector gv) {
    validate_table(t, gv, false);
    require(interpolate(t, gv, 1.0, false) >= 1.0, "Nonlinearity: g(1) must be >= 1");
    Nonlinearity g;
    g.kind_ = Kind::general_decreasing;
    g.q_ = std::nan("");
    g.fn_ = [t, gv](double x) { return interpolate(t, gv, x, false); };
    g.label_ = "tabulated";
    g.table_ = std::make_pair(std::move(t), std::move(gv));
    return g;
}

double Nonlinearity::operator()(double t) const {
    if (is_power()) return std::pow(t, q_);
    return fn_(t);
}

std::string Nonlinearity::describe() const {
    std::ostringstream os;
    if (is_power()) {
        os << "power(q=" << q_ << ")";
    } else {
        os << (increasing() ? "increasing:" : "decreasing:") << label_;
    }
    return os.str();
}

double reciprocal_integral_above(const Nonlinearity& g, double t) {
    require(g.increasing(), "reciprocal_integral_above: needs an increasing nonlinearity");
    require(t >= 1.0, "reciprocal_integral_above: t must be >= 1");
    if (std::isinf(t)) return reciprocal_integral_limit(g);
    if (g.is_power()) {
        const double q = g.q();
        if (q == 1.0) return std::log(t);
        const double e = 1.0 - q;
        return std::expm1(e * std::log(t)) / e;
    }
    return integrate([&g](double s) { return reciprocal(g, s); }, 1.0, t);
}

double reciprocal_integral_limit(const Nonlinearity& g) {
    require(g.increasing(), "reciprocal_integral_limit: needs an increasing nonlinearity");
    if (g.is_power()) {
        const double q = g.q();
        return q <= 1.0 ? kInf : 1.0 / (q - 1.0);
    }
    // Doubling horizons [2^m, 2^(m+1)]. A tail whose increments shrink by a
    // stable geometric ratio is summed in closed form.
    const auto f = [&g](double s) { return reciprocal(g, s); };
    double total = 0.0;
    double prev_inc = std::nan("");
    double prev_ratio = std::nan("");
    int stable = 0;
    for (int m = 0;; ++m) {
        const double lo = std::ldexp(1.0, m);
        const double hi = std::ldexp(1.0, m + 1);
        const double inc = integrate(f, lo, hi);
        total += inc;
        if (inc < kTailIncrement) return total;
        const double ratio = inc / prev_inc;
        if (std::isfinite(ratio) && ratio < 1.0 - 1e-3 && std::abs(ratio - prev_ratio) <= 1e-6 * ratio) {
            if (++stable >= 3) return total + inc * ratio / (1.0 - ratio);
        } else {
            stable = 0;
        }
        prev_inc = inc;
        prev_ratio = ratio;
        if (hi > kHorizon) return kInf;
    }
}

double reciprocal_integral_below(const Nonlinearity& g, double t) {
    require(!g.increasing(), "reciprocal_integral_below: needs a decreasing nonlinearity");
    require(t >= 0.0 && t <= 1.0, "reciprocal_integral_below: t must lie in [0, 1]");
    if (g.is_power()) {
        const double e = 1.0 - g.q();
        return (1.0 - std::pow(t, e)) / e;
    }
    return integrate([&g](double s) { return reciprocal(g, s); }, t, 1.0);
}

double inverse_reciprocal_integral(const Nonlinearity& g, double tau) {
    require(tau >= 0.0 && !std::isnan(tau), "inverse_reciprocal_integral: tau must be >= 0");
    if (tau == 0.0) return 1.0;
    if (g.increasing()) {
        if (g.is_power()) {
            const double q = g.q();
            if (q == 1.0) return std::exp(tau);
            require(q < 1.0 || tau < 1.0 / (q - 1.0), "inverse_reciprocal_integral: tau outside [0, a)");
            return power_inverse(q, tau, 1.0);
        }
        require(std::isfinite(tau), "inverse_reciprocal_integral: tau outside [0, a)");
        double hi = 2.0;
        while (reciprocal_integral_above(g, hi) < tau) {
            hi *= 2.0;
            require(hi < 1e300, "inverse_reciprocal_integral: tau outside [0, a)");
        }
        const auto f = [&](double t) { return reciprocal_integral_above(g, t) - tau; };
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(f, 1.0, hi, -tau, f(hi),
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
        return 0.5 * (r.first + r.second);
    }
    const double full = reciprocal_integral_below(g, 0.0);
    if (g.is_power()) {
        const double q = g.q();
        require(tau <= 1.0 / (1.0 - q), "inverse_reciprocal_integral: tau outside [0, F(0)]");
        const double base = 1.0 - (1.0 - q) * tau;
        return base <= 0.0 ? 0.0 : power_inverse(q, tau, -1.0);
    }
    require(tau <= full * (1.0 + 1e-12), "inverse_reciprocal_integral: tau outside [0, F(0)]");
    if (tau >= full) return 0.0;
    const auto f = [&](double t) { return reciprocal_integral_below(g, t) - tau; };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, 0.0, 1.0, full - tau, -tau,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

double comparison_function(const Nonlinearity& g, double b, double t) {
    require(b >= 1.0, "comparison_function: b must be >= 1");
    if (g.increasing()) {
        require(t >= 0.0, "comparison_function: t must be >= 0");
        return g(t / b + 1.0);
    }
    require(t >= 0.0 && t <= b, "comparison_function: t must lie in [0, b]");
    return g(std::max(0.0, 1.0 - t / b));
}

double ComparisonLadder::max_valid_t(std::size_t k) const {
    const std::size_t v = valid_nodes.at(k);
    return v == 0 ? -1.0 : grid[v - 1];
}

double ComparisonLadder::value(std::size_t k, double t) const {
    const Vector& level = levels.at(k);
    const std::size_t v = valid_nodes.at(k);
    if (v == 0 || t < 0.0 || t > grid[v - 1]) return std::nan("");
    if (grid.size() == 1) return level[0];
    const double step = grid[1] - grid[0];
    std::size_t lo = static_cast<std::size_t>(t / step);
    if (lo >= v - 1) return level[v - 1];
    const double frac = (t - grid[lo]) / step;
    return level[lo] + frac * (level[lo + 1] - level[lo]);
}

ComparisonLadder comparison_ladder(const Nonlinearity& g, double b, std::size_t depth, double t_max,
                                   std::size_t grid_size) {
    require(b >= 1.0, "comparison_ladder: b must be >= 1");
    require(t_max >= 0.0 && std::isfinite(t_max), "comparison_ladder: t_max must be finite and >= 0");
    require(grid_size >= 2, "comparison_ladder: need at least two grid nodes");
    ComparisonLadder ladder;
    ladder.b = b;
    ladder.t_max = t_max;
    ladder.grid.resize(grid_size);
    const double step = t_max / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i) ladder.grid[i] = step * static_cast<double>(i);
    ladder.grid.back() = t_max;

    const bool up = g.increasing();
    const auto admissible = [&](double v) { return std::isfinite(v) && (up || v <= b); };
    const auto prefix = [&](const Vector& level, std::size_t limit) {
        std::size_t v = 0;
        while (v < limit && admissible(level[v])) ++v;
        return v;
    };

    ladder.levels.push_back(ladder.grid);
    ladder.valid_nodes.push_back(prefix(ladder.grid, grid_size));
    for (std::size_t k = 0; k < depth; ++k) {
        const Vector& prev = ladder.levels.back();
        const std::size_t v_prev = ladder.valid_nodes.back();
        Vector next(grid_size, std::nan(""));
        if (v_prev > 0) {
            Vector integrand(v_prev);
            for (std::size_t i = 0; i < v_prev; ++i) integrand[i] = comparison_function(g, b, prev[i]);
            next[0] = 0.0;
            for (std::size_t i = 1; i < v_prev; ++i) {
                next[i] = next[i - 1] + 0.5 * step * (integrand[i - 1] + integrand[i]);
            }
        }
        std::size_t v = prefix(next, v_prev);
        // psi >= 1 makes the ladder nondecreasing in k; enforce it against rounding.
        for (std::size_t i = 0; i < v; ++i) next[i] = std::max(next[i], prev[i]);
        v = prefix(next, v);
        ladder.levels.push_back(std::move(next));
        ladder.valid_nodes.push_back(v);
    }
    return ladder;
}

ComparisonLimit comparison_limit(const Nonlinearity& g, double b, double t, std::size_t rk4_steps) {
    require(b >= 1.0, "comparison_limit: b must be >= 1");
    require(t >= 0.0 && std::isfinite(t), "comparison_limit: t must be finite and >= 0");
    require(rk4_steps >= 1, "comparison_limit: need at least one RK4 step");
    const double tau = t / b;
    ComparisonLimit out;
    if (g.increasing()) {
        require(tau < reciprocal_integral_limit(g), "comparison_limit: t / b must be below F(inf)");
        out.closed_form = b * (inverse_reciprocal_integral(g, tau) - 1.0);
    } else {
        require(tau <= reciprocal_integral_below(g, 0.0), "comparison_limit: t / b must be at most F(0)");
        out.closed_form = b * (1.0 - inverse_reciprocal_integral(g, tau));
    }

    const bool up = g.increasing();
    const auto rhs = [&](double y) { return up ? g(y / b + 1.0) : g(std::max(0.0, 1.0 - y / b)); };
    const double h = t / static_cast<double>(rk4_steps);
    double y = 0.0;
    for (std::size_t s = 0; s < rk4_steps && t > 0.0; ++s) {
        const double k1 = rhs(y);
        const double k2 = rhs(y + 0.5 * h * k1);
        const double k3 = rhs(y + 0.5 * h * k2);
        const double k4 = rhs(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.integrated = y;
    const double scale = std::max(std::abs(out.closed_form), std::abs(out.integrated));
    out.relative_gap = scale > 0.0 ? std::abs(out.closed_form - out.integrated) / scale : 0.0;
    out.agrees = out.relative_gap <= 1e-8;
    return out;
}

IterationConstant iteration_constant(double q, int k) {
    require(q > 0.0 && std::isfinite(q), "iteration_constant: q must be positive");
    require(k >= 0, "iteration_constant: k must be >= 0");
    IterationConstant out;
    double partial = 1.0;  // 1 + q + ... + q^j
    double qj = 1.0;
    for (int j = 1; j <= k; ++j) {
        qj *= q;
        partial += qj;
        out.value *= std::pow(partial, std::pow(q, k - j));
    }
    if (!std::isfinite(out.value)) {
        out.value = kInf;
        out.overflow = true;
    }
    return out;
}

}  // namespace potlab
