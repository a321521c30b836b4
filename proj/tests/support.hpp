#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "potlab/measure_kernel.hpp"

namespace testutil {

using potlab::Coords;
using potlab::Kernel;
using potlab::MeasureSpace;
using potlab::Vector;

inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline MeasureSpace line(const Vector& xs, Vector weights = {}) {
    std::vector<Coords> c;
    for (double x : xs) c.push_back({x});
    if (weights.empty()) weights.assign(xs.size(), 1.0);
    return MeasureSpace(std::move(weights), std::move(c));
}

inline MeasureSpace random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::vector<Coords> c(n, Coords(dim));
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : c[i]) v = uniform(rng);
        w[i] = 0.05 + uniform(rng);
    }
    return MeasureSpace(std::move(w), std::move(c));
}

/// K = d^{-1} with d = |x - y|^s off the diagonal and +inf on it.
inline Kernel power_distance_kernel(const MeasureSpace& space, double s) {
    const std::size_t n = space.size();
    Vector e(n * n, potlab::kInf);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) e[i * n + j] = 1.0 / std::pow(space.distance(i, j), s);
    return Kernel(n, std::move(e), true, "power-distance");
}

/// Same kernel with a finite diagonal: K(i,i) = factor * max_j K(i,j).
inline Kernel with_finite_diagonal(const Kernel& k, double factor) {
    const std::size_t n = k.size();
    Vector e = k.entries();
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) m = std::max(m, e[i * n + j]);
        e[i * n + i] = factor * m;
    }
    return Kernel(n, std::move(e), true, k.name());
}

/// Brute-force quasi-metric constant, independent of the library's scan.
inline double brute_kappa(const Kernel& k) {
    const std::size_t n = k.size();
    auto d = [&](std::size_t i, std::size_t j) { return potlab::ext_recip(k(i, j)); };
    double best = 0.5;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                const double num = d(x, y);
                const double den = d(x, z) + d(y, z);
                if (num == 0.0 || std::isinf(den)) continue;
                best = std::max(best, den == 0.0 ? potlab::kInf : num / den);
            }
    return best;
}

}  // namespace testutil
