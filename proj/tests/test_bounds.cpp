#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "potlab/bounds.hpp"
#include "potlab/principles.hpp"
#include "support.hpp"

using namespace potlab;
using doctest::Approx;

TEST_CASE("lower bound for general g") {
    const auto g1 = Nonlinearity::power(1.0);
    const auto g2 = Nonlinearity::power(2.0);
    CHECK(lower_bound_general(0.0, 3.0, g2).bound == 1.0);
    const BoundValue e = lower_bound_general(1.0, 1.0, g1);
    CHECK(e.bound == Approx(std::numbers::e).epsilon(1e-14));
    CHECK(e.condition == Condition::not_applicable);
    const BoundValue v = lower_bound_general(1.0, 1.0, g2);
    CHECK(v.condition == Condition::violated);
    CHECK(v.boundary);
    CHECK(std::isinf(v.bound));
    CHECK(lower_bound_general(0.5, 1.0, g2).condition == Condition::holds);
}

TEST_CASE("lower bound for powers") {
    CHECK(lower_bound_power(0.5, 1.0, 2.0).bound == Approx(2.0).epsilon(1e-15));
    CHECK(lower_bound_power(2.0, 2.0, 1.0).bound == Approx(1.0 + 2.0 * (std::numbers::e - 1.0)).epsilon(1e-15));
    CHECK(lower_bound_power(0.0, 1.0, 0.5).bound == 1.0);
    CHECK(lower_bound_power(0.0, 1.0, 0.5).condition == Condition::not_applicable);
    const BoundValue far = lower_bound_power(3.0, 1.0, 2.0);
    CHECK(far.condition == Condition::violated);
    CHECK_FALSE(far.boundary);
    CHECK(std::isinf(lower_bound_power(kInf, 1.0, 0.5).bound));
    CHECK(lower_bound_power(kInf, 1.0, 2.0).condition == Condition::violated);
}

TEST_CASE("upper bound for decreasing g") {
    const auto gm1 = Nonlinearity::power(-1.0);
    CHECK(upper_bound_general(0.0, 2.0, gm1).bound == 1.0);
    CHECK(upper_bound_general(0.3, 1.0, gm1).bound == Approx(std::sqrt(0.4)).epsilon(1e-14));
    CHECK(upper_bound_general(0.49, 1.0, gm1).condition == Condition::holds);
    const BoundValue past = upper_bound_general(0.6, 1.0, gm1);
    CHECK(past.condition == Condition::violated);
    CHECK(past.bound == 0.0);

    CHECK(upper_bound_power_negative(0.09, 1.0, -1.0).bound == Approx(std::sqrt(0.82)).epsilon(1e-14));
    CHECK(upper_bound_power_negative(0.09, 1.0, -1.0).condition == Condition::holds);
    CHECK(upper_bound_power_negative(0.0, 3.0, -2.0).bound == 1.0);
    CHECK(upper_power_threshold(2.0, -1.0) == Approx(0.75).epsilon(1e-15));
    CHECK(upper_power_threshold(1.0, -1.0) == Approx(0.5).epsilon(1e-15));
    const BoundValue edge = upper_bound_power_negative(0.75, 2.0, -1.0);
    CHECK(edge.condition == Condition::violated);
    CHECK(edge.boundary);
    CHECK(upper_bound_power_negative(kInf, 1.0, -1.0).condition == Condition::violated);
}

TEST_CASE("h-weighted bounds") {
    CHECK(bounds_with_h(0.0, 3.0, 2.0, 0.5).bound == 3.0);
    CHECK(bounds_with_h(2.0, 2.0, 1.0, 1.0).bound == Approx(2.0 * std::numbers::e).epsilon(1e-15));
    CHECK(bounds_with_h(1.0, 1.0, 1.0, 2.0).condition == Condition::violated);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const double pot = testutil::uniform(rng) * 0.4;
        const double h = 0.5 + testutil::uniform(rng) * 2.0;
        const double b = 1.0 + testutil::uniform(rng) * 3.0;
        for (double q : {0.3, 1.0, 2.0}) CHECK(bounds_with_h(pot, h, b, q).bound == h * lower_bound_power(pot / h, b, q).bound);
        for (double q : {-0.5, -2.0}) {
            CHECK(bounds_with_h(pot, h, b, q).bound == h * upper_bound_power_negative(pot / h, b, q).bound);
        }
    }
    CHECK_THROWS_AS(bounds_with_h(1.0, 0.0, 1.0, 2.0), InvalidArgument);
}

TEST_CASE("homogeneous sublinear bound") {
    CHECK(homogeneous_sublinear_bound(0.0, 1.0, 0.5) == 0.0);
    CHECK(homogeneous_sublinear_bound(1.0, 1.0, 0.5) == Approx(0.25).epsilon(1e-15));
    CHECK(homogeneous_sublinear_bound(1.0, 4.0, 0.5) == Approx(0.0625).epsilon(1e-15));
    CHECK_THROWS_AS(homogeneous_sublinear_bound(1.0, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(homogeneous_sublinear_bound(1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("iterated power bound") {
    CHECK(iterated_power_bound(0.7, 3.0, 2.0, 0).value == 0.7);
    CHECK(iterated_power_bound(1.0, 1.0, 1.0, 2).value == Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(iterated_power_bound(2.0, 1.0, 2.0, 1).value == Approx(8.0 / 3.0).epsilon(1e-15));
    const IteratedBound huge = iterated_power_bound(10.0, 1.0, 3.0, 300);
    CHECK(huge.overflow);
    CHECK(huge.value == 0.0);
    const IteratedBound tiny = iterated_power_bound(0.5, 1.0, 3.0, 300);
    CHECK_FALSE(tiny.overflow);
    CHECK(tiny.value == 0.0);
    // 3^1023 overflows on its own; the quotient does not.
    const IteratedBound mid = iterated_power_bound(3.0, 1.0, 2.0, 9);
    double log_c = 0.0;
    for (int j = 1; j <= 9; ++j) log_c += std::pow(2.0, 9 - j) * std::log(std::pow(2.0, j + 1) - 1.0);
    CHECK_FALSE(mid.overflow);
    CHECK(std::log(mid.value) == Approx(1023.0 * std::log(3.0) - log_c).epsilon(1e-12));
    CHECK_THROWS_AS(iterated_power_bound(-1.0, 1.0, 2.0, 1), InvalidArgument);
}

TEST_CASE("bounds are monotone in pot and b") {
    const std::vector<double> bs = {1.0, 1.5, 2.0, 4.0};
    for (double q : {0.3, 0.5, 1.0, 1.5, 2.0}) {
        for (double b : bs) {
            double prev = 0.0;
            for (int i = 0; i <= 50; ++i) {
                const double pot = 0.02 * i;
                const BoundValue v = lower_bound_power(pot, b, q);
                CHECK(v.bound >= prev);
                prev = v.bound;
            }
        }
        for (int i = 0; i <= 20; ++i) {
            const double pot = 0.03 * i;
            double prev = kInf;
            for (double b : bs) {
                const double v = lower_bound_power(pot, b, q).bound;
                CHECK(v <= prev);
                prev = v;
            }
        }
    }
    for (double q : {-0.5, -1.0, -2.0}) {
        for (double b : bs) {
            double prev = 1.0;
            for (int i = 0; i <= 50; ++i) {
                const double v = upper_bound_power_negative(0.02 * i, b, q).bound;
                CHECK(v <= prev);
                CHECK(v >= 0.0);
                prev = v;
            }
        }
        for (int i = 0; i <= 20; ++i) {
            double prev = 0.0;
            for (double b : bs) {
                const double v = upper_bound_power_negative(0.02 * i, b, q).bound;
                CHECK(v >= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("power and general forms agree") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) {
        const double b = 1.0 + 3.0 * testutil::uniform(rng);
        const double pot = 0.8 * testutil::uniform(rng);
        for (double q : {0.3, 0.5, 1.0, 1.5, 2.0}) {
            const BoundValue p = lower_bound_power(pot, b, q);
            const BoundValue g = lower_bound_general(pot, b, Nonlinearity::power(q));
            CHECK(p.condition == g.condition);
            if (std::isfinite(p.bound)) CHECK(p.bound == Approx(g.bound).epsilon(1e-12));
        }
        for (double q : {-0.5, -1.0, -2.0}) {
            const BoundValue p = upper_bound_power_negative(pot, b, q);
            const BoundValue g = upper_bound_general(pot, b, Nonlinearity::power(q));
            CHECK(p.condition == g.condition);
            CHECK(p.bound == Approx(g.bound).epsilon(1e-12));
        }
    }
}

TEST_CASE("power bounds are continuous at q = 1") {
    for (double b : {1.0, 2.0}) {
        for (double pot : {0.1, 0.5, 1.0}) {
            const double exp_form = lower_bound_power(pot, b, 1.0).bound;
            CHECK(lower_bound_power(pot, b, 1.0 - 1e-6).bound == Approx(exp_form).epsilon(1e-4));
            CHECK(lower_bound_power(pot, b, 1.0 + 1e-6).bound == Approx(exp_form).epsilon(1e-4));
        }
    }
}

TEST_CASE("power iterate inequality") {
    const MeasureSpace sp(Vector{1.0, 2.0, 0.5});
    const Kernel k = Kernel::from_rows({{3, 1, 2}, {1, 4, 1}, {2, 1, 5}}, true);
    for (double v : power_iterate_inequality_check(k, sp, 1.0, 2.0)) CHECK(v == Approx(0.0).scale(1.0));

    const std::size_t n = 1001;
    const double step = 1.0 / (n - 1);
    Vector xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = step * i;
    const MeasureSpace grid = testutil::line(xs, Vector(n, step));
    const Vector res = power_iterate_inequality_check(volterra_kernel(grid), grid, 2.0, 1.0);
    for (double v : res) {
        CHECK(v >= -1e-9);
        CHECK(v <= 2.0 * step);
    }

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const MeasureSpace cloud = testutil::random_cloud(rng, 8, 2);
        const Kernel rk = radial_kernel(cloud, [](double r) { return std::exp(-r); });
        const double b = certified_b(quasimetric_constant(rk));
        for (double r : {0.5, 2.0, 3.0})
            for (double v : power_iterate_inequality_check(rk, cloud, r, b)) CHECK(v >= -1e-9);
    }
    CHECK_THROWS_AS(power_iterate_inequality_check(k, sp, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("bound report margins") {
    const Vector pot = {0.0, 0.2, 0.4};
    const Vector h = {1.0, 1.0, 1.0};
    const Vector u = {1.0, 1.5, 1.2};
    const BoundReport r = power_bound_report(pot, h, 1.0, 1.0, u);
    CHECK(r.lower);
    CHECK(r.rows.size() == 3);
    CHECK(*r.rows[0].margin == 0.0);
    CHECK(*r.rows[1].margin == Approx(1.5 - std::exp(0.2)));
    CHECK(r.violations() == 1);
    CHECK(r.min_margin() == Approx(1.2 - std::exp(0.4)));

    const BoundReport up = power_bound_report(pot, h, 1.0, -1.0, Vector{1.0, 0.7, 0.1});
    CHECK_FALSE(up.lower);
    CHECK(*up.rows[1].margin == Approx(std::sqrt(0.6) - 0.7));
    CHECK(up.violations() == 0);
    CHECK(to_string(Condition::holds) == "holds");
}
