#include "potlab/measure_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "potlab/simd.hpp"

namespace potlab {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

// y_i = sum_j K_ij g_j over the extended reals.
Vector matvec(const Kernel& kernel, std::span<const double> g) {
    const std::size_t n = kernel.size();
    Vector out(n, 0.0);
    const bool finite_input = std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); });
    if (!kernel.has_infinite() && finite_input) {
        simd::active().rows_dot(kernel.entries().data(), n, n, g.data(), out.data());
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = kernel.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += ext_mul(row[j], g[j]);
        out[i] = acc;
    }
    return out;
}

void check_positive_finite(std::span<const double> h, std::size_t n, const char* who) {
    require(h.size() == n, std::string(who) + ": weight vector length mismatch");
    for (double v : h) {
        require(std::isfinite(v) && v > 0.0, std::string(who) + ": weight must be positive and finite");
    }
}

}  // namespace

MeasureSpace::MeasureSpace(Vector weights, std::vector<Coords> coords)
    : weights_(std::move(weights)), coords_(std::move(coords)) {
    require(!weights_.empty(), "MeasureSpace: no points");
    bool any_positive = false;
    for (double w : weights_) {
        require(std::isfinite(w) && w >= 0.0, "MeasureSpace: weights must be finite and >= 0");
        any_positive = any_positive || w > 0.0;
    }
    require(any_positive, "MeasureSpace: at least one weight must be positive");
    if (!coords_.empty()) {
        require(coords_.size() == weights_.size(), "MeasureSpace: one coordinate vector per point");
        const std::size_t d = coords_.front().size();
        require(d >= 1, "MeasureSpace: coordinate dimension must be >= 1");
        for (const auto& c : coords_) {
            require(c.size() == d, "MeasureSpace: coordinates must share one dimension");
            for (double x : c) require(std::isfinite(x), "MeasureSpace: non-finite coordinate");
        }
    }
}

double MeasureSpace::total_mass() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double MeasureSpace::distance(std::size_t i, std::size_t j) const {
    require(has_coords(), "MeasureSpace: no coordinates");
    const auto& a = coords_.at(i);
    const auto& b = coords_.at(j);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

Measure::Measure(Vector values) : values_(std::move(values)) {
    for (double v : values_) require(is_extended_nonneg(v), "Measure: entries must be >= 0");
}

Measure Measure::dirac(std::size_t n, std::size_t at, double mass) {
    require(at < n, "Measure::dirac: index out of range");
    Vector v(n, 0.0);
    v[at] = mass;
    return Measure(std::move(v));
}

Kernel::Kernel(std::size_t n, Vector entries, bool symmetric, std::string name)
    : n_(n), entries_(std::move(entries)), symmetric_(symmetric), name_(std::move(name)) {
    require(n_ > 0, "Kernel: empty");
    require(entries_.size() == n_ * n_, "Kernel: entries must be n*n");
    for (double v : entries_) {
        require(is_extended_nonneg(v), "Kernel: entries must lie in [0, +inf]");
        has_infinite_ = has_infinite_ || std::isinf(v);
    }
    if (symmetric_) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                require(entries_[i * n_ + j] == entries_[j * n_ + i], "Kernel: declared symmetric but is not");
    }
}

Kernel Kernel::from_rows(const std::vector<Vector>& rows, bool symmetric, std::string name) {
    const std::size_t n = rows.size();
    Vector entries;
    entries.reserve(n * n);
    for (const auto& r : rows) {
        require(r.size() == n, "Kernel::from_rows: matrix must be square");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return Kernel(n, std::move(entries), symmetric, std::move(name));
}

Kernel Kernel::identity(std::size_t n) {
    Vector e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return Kernel(n, std::move(e), true, "identity");
}

bool Kernel::positive_off_diagonal() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j && entries_[i * n_ + j] <= 0.0) return false;
    return true;
}

std::vector<Vector> Kernel::rows() const {
    std::vector<Vector> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i].assign(entries_.begin() + i * n_, entries_.begin() + (i + 1) * n_);
    return out;
}

Vector apply(const Kernel& kernel, const MeasureSpace& space, std::span<const double> f) {
    const std::size_t n = kernel.size();
    require(space.size() == n, "apply: kernel and space sizes differ");
    require(f.size() == n, "apply: function length mismatch");
    Vector g(n);
    for (std::size_t j = 0; j < n; ++j) {
        require(is_extended_nonneg(f[j]), "apply: f must be nonnegative");
        g[j] = ext_mul(f[j], space.weight(j));
    }
    return matvec(kernel, g);
}

Vector potential(const Kernel& kernel, std::span<const double> nu) {
    require(nu.size() == kernel.size(), "potential: measure length mismatch");
    for (double v : nu) require(is_extended_nonneg(v), "potential: measure must be nonnegative");
    return matvec(kernel, nu);
}

Vector potential(const Kernel& kernel, const Measure& nu) { return potential(kernel, std::span<const double>(nu.values())); }

Kernel riesz_kernel(const MeasureSpace& space, double alpha, int dim, const DiagonalPolicy& diagonal) {
    require(space.has_coords(), "riesz_kernel: space has no coordinates");
    require(dim >= 1 && space.dim() == static_cast<std::size_t>(dim), "riesz_kernel: coordinate dimension must equal dim");
    require(alpha > 0.0 && alpha < dim, "riesz_kernel: need 0 < alpha < dim");
    const std::size_t n = space.size();
    if (diagonal.kind == DiagonalPolicy::Kind::cell_average) {
        require(diagonal.cell_values.size() == n, "riesz_kernel: one cell-average value per point");
    }
    const double expo = alpha - dim;
    Vector e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = space.distance(i, j);
            const double k = r > 0.0 ? std::pow(r, expo) : kInf;
            e[i * n + j] = k;
            e[j * n + i] = k;
        }
        double d = 0.0;
        switch (diagonal.kind) {
            case DiagonalPolicy::Kind::exclude: d = 0.0; break;
            case DiagonalPolicy::Kind::cap: d = diagonal.ceiling; break;
            case DiagonalPolicy::Kind::cell_average: d = diagonal.cell_values[i]; break;
            case DiagonalPolicy::Kind::singular: d = kInf; break;
        }
        require(is_extended_nonneg(d), "riesz_kernel: diagonal value must be >= 0");
        e[i * n + i] = d;
    }
    return Kernel(n, std::move(e), true, "riesz");
}

Vector riesz_ball_average_diagonal(const MeasureSpace& space, double alpha, int dim) {
    require(space.size() >= 2, "riesz_ball_average_diagonal: need at least two points");
    require(alpha > 0.0 && alpha < dim, "riesz_ball_average_diagonal: need 0 < alpha < dim");
    const std::size_t n = space.size();
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double nn = kInf;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) nn = std::min(nn, space.distance(i, j));
        require(nn > 0.0, "riesz_ball_average_diagonal: coincident points");
        const double rho = 0.5 * nn;
        out[i] = (static_cast<double>(dim) / alpha) * std::pow(rho, alpha - dim);
    }
    return out;
}

Kernel radial_kernel(const MeasureSpace& space, const RadialProfile& profile, std::string name) {
    require(space.has_coords(), "radial_kernel: space has no coordinates");
    require(static_cast<bool>(profile), "radial_kernel: empty profile");
    const std::size_t n = space.size();
    Vector e(n * n, 0.0);
    std::vector<std::pair<double, double>> samples;
    samples.reserve(n * (n - 1) / 2 + 1);
    const double k0 = profile(0.0);
    samples.emplace_back(0.0, k0);
    for (std::size_t i = 0; i < n; ++i) {
        e[i * n + i] = k0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = space.distance(i, j);
            const double k = profile(r);
            samples.emplace_back(r, k);
            e[i * n + j] = k;
            e[j * n + i] = k;
        }
    }
    std::sort(samples.begin(), samples.end());
    for (std::size_t m = 0; m < samples.size(); ++m) {
        require(!std::isnan(samples[m].second) && samples[m].second > 0.0, "radial_kernel: profile must be strictly positive");
        if (m > 0) {
            require(samples[m].second <= samples[m - 1].second, "radial_kernel: profile is not nonincreasing on the sampled radii");
        }
    }
    return Kernel(n, std::move(e), true, std::move(name));
}

Kernel volterra_kernel(const MeasureSpace& space) {
    require(space.has_coords() && space.dim() == 1, "volterra_kernel: need a 1-D grid");
    const std::size_t n = space.size();
    for (std::size_t i = 1; i < n; ++i) {
        require(space.point(i)[0] > space.point(i - 1)[0], "volterra_kernel: grid must be strictly increasing");
    }
    Vector e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) e[i * n + j] = 1.0;
    return Kernel(n, std::move(e), n == 1, "volterra");
}

Kernel scale_kernel(const Kernel& kernel, double lambda) {
    require(std::isfinite(lambda) && lambda >= 0.0, "scale_kernel: factor must be finite and >= 0");
    Vector e = kernel.entries();
    for (double& v : e) v = ext_mul(v, lambda);
    return Kernel(kernel.size(), std::move(e), kernel.symmetric(), kernel.name());
}

ModifiedKernel modify_w(const Kernel& kernel, std::size_t w) {
    const std::size_t n = kernel.size();
    require(w < n, "modify_w: index out of range");
    require(kernel.symmetric(), "modify_w: kernel must be symmetric");
    require(kernel.positive_off_diagonal(), "modify_w: kernel must be positive off the diagonal");
    ModifiedKernel out;
    for (std::size_t x = 0; x < n; ++x) {
        const double kxw = kernel(x, w);
        if (kxw > 0.0 && std::isfinite(kxw)) out.indices.push_back(x);
    }
    require(!out.indices.empty(), "modify_w: Omega_w is empty");
    const std::size_t m = out.indices.size();
    Vector e(m * m);
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t x = out.indices[a];
        for (std::size_t b = 0; b < m; ++b) {
            const std::size_t y = out.indices[b];
            e[a * m + b] = kernel(x, y) / (kernel(x, w) * kernel(y, w));
        }
    }
    out.kernel = Kernel(m, std::move(e), true, kernel.name() + "_w");
    return out;
}

Kernel modify_h(const Kernel& kernel, std::span<const double> h) {
    const std::size_t n = kernel.size();
    check_positive_finite(h, n, "modify_h");
    Vector e(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e[i * n + j] = kernel(i, j) / (h[i] * h[j]);
    return Kernel(n, std::move(e), kernel.symmetric(), kernel.name() + "^h");
}

Kernel weighted_kernel_gh(const Kernel& kernel, std::span<const double> h, double q) {
    const std::size_t n = kernel.size();
    check_positive_finite(h, n, "weighted_kernel_gh");
    require(std::isfinite(q), "weighted_kernel_gh: q must be finite");
    Vector e(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e[i * n + j] = ext_mul(kernel(i, j), std::pow(h[j], q)) / h[i];
    bool symmetric = kernel.symmetric();
    if (symmetric) {
        for (std::size_t i = 0; i < n && symmetric; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (e[i * n + j] != e[j * n + i]) {
                    symmetric = false;
                    break;
                }
    }
    return Kernel(n, std::move(e), symmetric, kernel.name() + "^gh");
}

MeasureSpace restrict_space(const MeasureSpace& space, std::span<const std::size_t> indices) {
    Vector w;
    std::vector<Coords> c;
    for (std::size_t i : indices) {
        w.push_back(space.weight(i));
        if (space.has_coords()) c.push_back(space.point(i));
    }
    return MeasureSpace(std::move(w), std::move(c));
}

}  // namespace potlab
