#include "potlab/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace potlab {

namespace {

constexpr double kBoundaryTol = 1e-12;

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

void check_inputs(double pot, double b) {
    require(!std::isnan(pot) && pot >= 0.0, "bound: potential must be >= 0");
    require(b >= 1.0 && std::isfinite(b), "bound: b must be finite and >= 1");
}

// Strict condition tau < threshold, with equality up to 1e-12 counted as a
// violation.
BoundValue classify(double tau, double threshold) {
    BoundValue v;
    if (std::isinf(threshold)) {
        v.condition = std::isinf(tau) ? Condition::violated : Condition::not_applicable;
        return v;
    }
    const double tol = kBoundaryTol * std::max(1.0, threshold);
    if (tau >= threshold - tol) {
        v.condition = Condition::violated;
        v.boundary = std::abs(tau - threshold) <= tol;
    } else {
        v.condition = Condition::holds;
    }
    return v;
}

}  // namespace

std::string to_string(Condition c) {
    switch (c) {
        case Condition::holds: return "holds";
        case Condition::violated: return "violated";
        case Condition::not_applicable: return "not_applicable";
    }
    return "unknown";
}

BoundValue lower_bound_general(double pot, double b, const Nonlinearity& g) {
    check_inputs(pot, b);
    require(g.increasing(), "lower_bound_general: needs an increasing nonlinearity");
    const double tau = pot / b;
    BoundValue v = classify(tau, reciprocal_integral_limit(g));
    if (v.condition == Condition::violated) {
        v.bound = kInf;
        return v;
    }
    v.bound = 1.0 + b * (inverse_reciprocal_integral(g, tau) - 1.0);
    return v;
}

BoundValue lower_bound_power(double pot, double b, double q) {
    check_inputs(pot, b);
    require(q > 0.0 && std::isfinite(q), "lower_bound_power: q must be positive");
    const double tau = pot / b;
    BoundValue v = classify(tau, q > 1.0 ? 1.0 / (q - 1.0) : kInf);
    if (v.condition == Condition::violated) {
        v.bound = kInf;
        return v;
    }
    if (q == 1.0) {
        v.bound = 1.0 + b * std::expm1(tau);
    } else {
        const double e = 1.0 - q;
        v.bound = 1.0 + b * std::expm1(std::log1p(e * tau) / e);
    }
    return v;
}

BoundValue upper_bound_general(double pot, double b, const Nonlinearity& g) {
    check_inputs(pot, b);
    require(!g.increasing(), "upper_bound_general: needs a decreasing nonlinearity");
    const double tau = pot / b;
    BoundValue v = classify(tau, reciprocal_integral_below(g, 1.0 - 1.0 / b));
    if (v.condition == Condition::violated) {
        v.bound = 0.0;
        return v;
    }
    v.bound = 1.0 - b * (1.0 - inverse_reciprocal_integral(g, tau));
    return v;
}

double upper_power_threshold(double b, double q) {
    require(b >= 1.0 && std::isfinite(b), "upper_power_threshold: b must be finite and >= 1");
    require(q < 0.0 && std::isfinite(q), "upper_power_threshold: q must be negative");
    const double e = 1.0 - q;
    return (b / e) * (1.0 - std::pow(1.0 - 1.0 / b, e));
}

BoundValue upper_bound_power_negative(double pot, double b, double q) {
    check_inputs(pot, b);
    require(q < 0.0 && std::isfinite(q), "upper_bound_power_negative: q must be negative");
    const double e = 1.0 - q;
    const double tau = pot / b;
    BoundValue v = classify(tau, upper_power_threshold(b, q) / b);
    if (v.condition == Condition::violated) {
        v.bound = 0.0;
        return v;
    }
    // 1 - F^{-1}(tau) = -expm1(log1p(-e tau) / e)
    v.bound = 1.0 + b * std::expm1(std::log1p(-e * tau) / e);
    return v;
}

BoundValue bounds_with_h(double pot_hq, double h_at_x, double b, double q) {
    require(h_at_x > 0.0 && std::isfinite(h_at_x), "bounds_with_h: h must be positive and finite");
    require(q != 0.0 && std::isfinite(q), "bounds_with_h: q must be finite and nonzero");
    BoundValue v = q > 0.0 ? lower_bound_power(pot_hq / h_at_x, b, q) : upper_bound_power_negative(pot_hq / h_at_x, b, q);
    v.bound *= h_at_x;
    return v;
}

double homogeneous_sublinear_bound(double pot, double b, double q) {
    check_inputs(pot, b);
    require(q > 0.0 && q < 1.0, "homogeneous_sublinear_bound: q must lie in (0, 1)");
    if (pot == 0.0) return 0.0;
    const double e = 1.0 - q;
    return std::pow(e, 1.0 / e) * std::pow(b, -q / e) * std::pow(pot, 1.0 / e);
}

IteratedBound iterated_power_bound(double f0, double b, double q, int k) {
    require(!std::isnan(f0) && f0 >= 0.0, "iterated_power_bound: f0 must be >= 0");
    require(b >= 1.0 && std::isfinite(b), "iterated_power_bound: b must be finite and >= 1");
    const IterationConstant c = iteration_constant(q, k);
    IteratedBound out;
    if (f0 == 0.0) return out;
    if (std::isinf(f0)) {
        out.value = kInf;
        return out;
    }
    double s0 = 1.0;  // 1 + q + ... + q^k
    double qi = 1.0;
    for (int i = 1; i <= k; ++i) {
        qi *= q;
        s0 += qi;
    }
    const double s1 = s0 - 1.0;
    if (!c.overflow) {
        const double direct = std::pow(f0, s0) / (c.value * std::pow(b, s1));
        if (std::isfinite(direct) && direct > 0.0) {
            out.value = direct;
            return out;
        }
    }
    double log_c = 0.0;
    double partial = 1.0;
    qi = 1.0;
    for (int j = 1; j <= k; ++j) {
        qi *= q;
        partial += qi;
        log_c += std::pow(q, k - j) * std::log(partial);
    }
    const double logv = s0 * std::log(f0) - log_c - s1 * std::log(b);
    const double v = std::exp(logv);
    if (std::isfinite(v) && v > 0.0) {
        out.value = v;
    } else if (v == 0.0) {
        out.value = 0.0;
    } else {
        out.overflow = true;
    }
    return out;
}

Vector power_iterate_inequality_check(const Kernel& kernel, const MeasureSpace& space, double r, double b) {
    require(r > 0.0 && std::isfinite(r), "power_iterate_inequality_check: r must be positive");
    require(b >= 1.0 && std::isfinite(b), "power_iterate_inequality_check: b must be finite and >= 1");
    const std::size_t n = kernel.size();
    const Vector g1 = apply(kernel, space, Vector(n, 1.0));
    Vector powered(n);
    for (std::size_t j = 0; j < n; ++j) powered[j] = std::pow(g1[j], r - 1.0);
    const Vector inner = apply(kernel, space, powered);
    const double factor = r * std::pow(b, r - 1.0);
    Vector residual(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lhs = std::pow(g1[i], r);
        const double rhs = ext_mul(factor, inner[i]);
        if (std::isinf(lhs) && std::isinf(rhs)) {
            residual[i] = 0.0;
        } else {
            residual[i] = r >= 1.0 ? rhs - lhs : lhs - rhs;
        }
    }
    return residual;
}

double BoundReport::min_margin() const {
    double m = kInf;
    for (const auto& row : rows) {
        if (row.margin) m = std::min(m, *row.margin);
    }
    return m;
}

std::size_t BoundReport::violations() const {
    std::size_t count = 0;
    for (const auto& row : rows) {
        if (!row.margin || !row.reference) continue;
        if (*row.margin < -1e-9 * (1.0 + std::abs(*row.reference))) ++count;
    }
    return count;
}

BoundReport power_bound_report(std::span<const double> pot_hq, std::span<const double> h, double b, double q,
                               std::span<const double> u) {
    const std::size_t n = pot_hq.size();
    require(h.size() == n, "power_bound_report: h has the wrong length");
    require(u.empty() || u.size() == n, "power_bound_report: u has the wrong length");
    const bool weighted = std::any_of(h.begin(), h.end(), [](double v) { return v != 1.0; });
    BoundReport report;
    report.lower = q > 0.0;
    report.theorem = std::string(report.lower ? "lower_power" : "upper_power") + (weighted ? "_weighted" : "");
    report.nonlinearity = Nonlinearity::power(q).describe();
    report.b = b;
    report.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        BoundRow& row = report.rows[i];
        row.pot = pot_hq[i];
        row.h = h[i];
        row.value = bounds_with_h(pot_hq[i], h[i], b, q);
        if (!u.empty()) {
            row.reference = u[i];
            row.margin = report.lower ? u[i] - row.value.bound : row.value.bound - u[i];
        }
    }
    return report;
}

}  // namespace potlab
