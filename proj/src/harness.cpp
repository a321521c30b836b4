#include "potlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace potlab {

namespace {

using Clock = std::chrono::steady_clock;

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void config_require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

double num_or(const json& j, const char* key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return number_from_json(j.at(key));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

MeasureSpace make_space(const json& desc, std::mt19937_64& rng) {
    const auto kind = get_or<std::string>(desc, "kind", "grid");
    const auto n = get_or<std::size_t>(desc, "n", 32);
    const auto dim = get_or<std::size_t>(desc, "dim", 1);
    const double lo = num_or(desc, "lower", 0.0);
    const double hi = num_or(desc, "upper", 1.0);
    config_require(n >= 1, "space.n must be >= 1");
    config_require(dim >= 1 && dim <= 3, "space.dim must be 1, 2 or 3");
    config_require(hi > lo, "space.upper must exceed space.lower");

    std::vector<Coords> coords;
    Vector weights;
    if (kind == "grid") {
        config_require(n >= 2 || dim == 1, "a multi-dimensional grid needs n >= 2 per axis");
        const Vector w1 = n == 1 ? Vector{hi - lo} : trapezoid_weights(lo, hi, n);
        std::size_t total = 1;
        for (std::size_t k = 0; k < dim; ++k) total *= n;
        for (std::size_t idx = 0; idx < total; ++idx) {
            Coords c(dim);
            double w = 1.0;
            std::size_t rest = idx;
            for (std::size_t k = 0; k < dim; ++k) {
                const std::size_t a = rest % n;
                rest /= n;
                c[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(n - 1);
                w *= w1[a];
            }
            coords.push_back(std::move(c));
            weights.push_back(w);
        }
    } else if (kind == "random") {
        const double volume = std::pow(hi - lo, static_cast<double>(dim));
        for (std::size_t i = 0; i < n; ++i) {
            Coords c(dim);
            for (auto& v : c) v = lo + (hi - lo) * uniform(rng);
            coords.push_back(std::move(c));
            weights.push_back(volume / static_cast<double>(n));
        }
    } else {
        throw ConfigError("unknown space.kind: " + kind);
    }
    return MeasureSpace(std::move(weights), std::move(coords));
}

RadialProfile make_profile(const json& desc) {
    const auto profile = get_or<std::string>(desc, "profile", "exp");
    const double length = num_or(desc, "length", 0.5);
    const double power = num_or(desc, "power", 1.0);
    const double value = num_or(desc, "value", 1.0);
    config_require(length > 0.0, "kernel.length must be positive");
    if (profile == "exp") return [length](double r) { return std::exp(-r / length); };
    if (profile == "gaussian") return [length](double r) { return std::exp(-(r / length) * (r / length)); };
    if (profile == "inverse_power") {
        config_require(power > 0.0, "kernel.power must be positive");
        return [length, power](double r) { return std::pow(1.0 + r / length, -power); };
    }
    if (profile == "constant") {
        config_require(value > 0.0, "kernel.value must be positive");
        return [value](double) { return value; };
    }
    throw ConfigError("unknown kernel.profile: " + profile);
}

Kernel make_kernel(const json& desc, const MeasureSpace& space) {
    const auto family = get_or<std::string>(desc, "family", "riesz");
    if (family == "riesz") {
        config_require(space.has_coords(), "riesz kernel needs coordinates");
        const int dim = static_cast<int>(space.dim());
        const double alpha = num_or(desc, "alpha", 0.5 * dim);
        const auto diag = get_or<std::string>(desc, "diagonal", "cell_average");
        DiagonalPolicy policy;
        if (diag == "exclude") {
            policy = DiagonalPolicy::exclude();
        } else if (diag == "cap") {
            policy = DiagonalPolicy::cap(num_or(desc, "ceiling", 1e6));
        } else if (diag == "singular") {
            policy = DiagonalPolicy::singular();
        } else if (diag == "cell_average") {
            config_require(space.size() >= 2, "cell_average diagonal needs at least two points");
            policy = DiagonalPolicy::cell_average(riesz_ball_average_diagonal(space, alpha, dim));
        } else {
            throw ConfigError("unknown kernel.diagonal: " + diag);
        }
        return riesz_kernel(space, alpha, dim, policy);
    }
    if (family == "radial") return radial_kernel(space, make_profile(desc), get_or<std::string>(desc, "profile", "exp"));
    if (family == "volterra") return volterra_kernel(space);
    if (family == "zero") return Kernel::zero(space.size());
    throw ConfigError("unknown kernel.family: " + family);
}

// Scale K so that max G1 equals the target.
Kernel normalize(const Kernel& kernel, const MeasureSpace& space, double target) {
    const Vector g1 = apply(kernel, space, Vector(space.size(), 1.0));
    double m = 0.0;
    for (double v : g1) m = std::max(m, v);
    config_require(std::isfinite(m) && m > 0.0, "cannot normalize a kernel with max G1 = 0 or inf");
    return scale_kernel(kernel, target / m);
}

Instance load_instance(const RunConfig& cfg) {
    return generate_instance({{"space", cfg.doc.value("space", json::object())},
                              {"kernel", cfg.doc.value("kernel", json::object())}},
                             cfg.seed);
}

Vector make_h(const json& desc, const Instance& inst, std::uint64_t seed) {
    const std::size_t n = inst.space.size();
    const auto kind = get_or<std::string>(desc, "kind", "one");
    if (kind == "one") return Vector(n, 1.0);
    if (kind == "constant") {
        const double v = num_or(desc, "value", 1.0);
        config_require(v > 0.0 && std::isfinite(v), "h.value must be positive");
        return Vector(n, v);
    }
    if (kind == "random") {
        std::mt19937_64 rng(get_or<std::uint64_t>(desc, "seed", seed ^ 0x9e3779b97f4a7c15ULL));
        Vector h(n);
        for (auto& v : h) v = 1.0 + uniform(rng);
        return h;
    }
    if (kind == "potential") {
        std::mt19937_64 rng(get_or<std::uint64_t>(desc, "seed", seed ^ 0x9e3779b97f4a7c15ULL));
        Vector nu(n);
        for (auto& v : nu) v = 0.1 + uniform(rng);
        Vector h = potential(inst.kernel, nu);
        for (const double v : h) config_require(v > 0.0 && std::isfinite(v), "h = K nu must be positive and finite");
        return h;
    }
    if (kind == "values") {
        Vector h = vector_from_json(desc.at("values"));
        config_require(h.size() == n, "h.values has the wrong length");
        return h;
    }
    throw ConfigError("unknown h.kind: " + kind);
}

SolveOptions solve_options(const json& doc) {
    const json s = doc.value("solver", json::object());
    SolveOptions o;
    o.tol = num_or(s, "tol", o.tol);
    o.max_iter = get_or<std::size_t>(s, "max_iter", o.max_iter);
    o.ceiling = num_or(s, "ceiling", o.ceiling);
    o.theta = num_or(s, "theta", o.theta);
    config_require(o.tol > 0.0 && o.max_iter > 0, "solver.tol and solver.max_iter must be positive");
    return o;
}

Nonlinearity load_nonlinearity(const json& doc) {
    try {
        return nonlinearity_from_json(doc.value("nonlinearity", json{{"kind", "power"}, {"q", 2.0}}));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("nonlinearity: ") + e.what());
    }
}

json space_row(const MeasureSpace& space, std::size_t i) {
    json row = {{"point", i}, {"weight", space.weight(i)}};
    if (space.has_coords()) {
        for (std::size_t k = 0; k < space.dim(); ++k) row["x" + std::to_string(k)] = space.point(i)[k];
    }
    return row;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    return v.dump();
}

}  // namespace

Vector trapezoid_weights(double lower, double upper, std::size_t n) {
    if (n < 2 || !(upper > lower)) throw InvalidArgument("trapezoid_weights: need n >= 2 and upper > lower");
    const double step = (upper - lower) / static_cast<double>(n - 1);
    Vector w(n, step);
    w.front() = w.back() = 0.5 * step;
    return w;
}

Instance generate_instance(const json& desc, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const json kdesc = desc.value("kernel", json::object());
    Instance inst;
    if (get_or<std::string>(kdesc, "family", "riesz") == "custom") {
        json data;
        if (kdesc.contains("data")) {
            data = kdesc.at("data");
        } else {
            config_require(kdesc.contains("path"), "custom kernel needs 'path' or 'data'");
            std::ifstream in(kdesc.at("path").get<std::string>());
            config_require(static_cast<bool>(in), "cannot open custom kernel file");
            try {
                in >> data;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("custom kernel file: ") + e.what());
            }
        }
        auto [space, kernel] = space_kernel_from_json(data);
        inst.space = std::move(space);
        inst.kernel = std::move(kernel);
    } else {
        inst.space = make_space(desc.value("space", json::object()), rng);
        inst.kernel = make_kernel(kdesc, inst.space);
    }
    const double scale = num_or(kdesc, "scale", 1.0);
    config_require(scale >= 0.0 && std::isfinite(scale), "kernel.scale must be finite and >= 0");
    if (scale != 1.0) inst.kernel = scale_kernel(inst.kernel, scale);
    if (kdesc.contains("normalize_max_g1")) {
        inst.kernel = normalize(inst.kernel, inst.space, num_or(kdesc, "normalize_max_g1", 1.0));
    }
    inst.description = {{"space", desc.value("space", json::object())}, {"kernel", kdesc}, {"seed", seed},
                        {"n", inst.space.size()}};
    return inst;
}

Instance random_sweep_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const bool grid = rng() % 2 == 0;
    const std::size_t dim = 1 + rng() % 2;
    json space;
    if (grid) {
        const std::size_t n = dim == 1 ? 8 + rng() % 57 : 3 + rng() % 6;
        space = {{"kind", "grid"}, {"n", n}, {"dim", dim}, {"lower", 0.0}, {"upper", 1.0}};
    } else {
        space = {{"kind", "random"}, {"n", 8 + rng() % 57}, {"dim", dim}, {"lower", 0.0}, {"upper", 1.0}};
    }
    json kernel;
    if (rng() % 2 == 0) {
        const double alpha = dim == 1 ? 0.2 + 0.6 * uniform(rng) : 0.5 + uniform(rng);
        kernel = {{"family", "riesz"}, {"alpha", alpha}, {"diagonal", "cell_average"}};
    } else if (rng() % 2 == 0) {
        kernel = {{"family", "radial"}, {"profile", "exp"}, {"length", 0.3 + 0.7 * uniform(rng)}};
    } else {
        kernel = {{"family", "radial"}, {"profile", "inverse_power"}, {"length", 0.05 + 0.5 * uniform(rng)},
                  {"power", 0.5 + 2.0 * uniform(rng)}};
    }
    kernel["normalize_max_g1"] = 0.1 + 1.9 * uniform(rng);
    return generate_instance({{"space", space}, {"kernel", kernel}}, rng());
}

RunConfig load_config(json doc) {
    config_require(doc.is_object(), "config must be a JSON object");
    static const std::set<std::string> known = {"command", "seed", "space", "kernel", "nonlinearity", "h",
                                                "b_policy", "b", "solver", "out", "format", "sharpness",
                                                "lemmas", "wmp", "homogeneous"};
    for (const auto& [key, _] : doc.items()) config_require(known.count(key) > 0, "unknown config key: " + key);
    RunConfig cfg;
    cfg.command = get_or<std::string>(doc, "command", "");
    cfg.seed = get_or<std::uint64_t>(doc, "seed", 1);
    cfg.out_dir = get_or<std::string>(doc, "out", ".");
    cfg.format = get_or<std::string>(doc, "format", "json");
    config_require(cfg.format == "json" || cfg.format == "csv" || cfg.format == "both",
                   "format must be json, csv or both");
    const auto policy = get_or<std::string>(doc, "b_policy", "certified_from_kappa");
    config_require(policy == "certified_from_kappa" || policy == "exhaustive_lp" || policy == "user",
                   "b_policy must be certified_from_kappa, exhaustive_lp or user");
    if (policy == "user") config_require(doc.contains("b"), "b_policy user needs b");
    cfg.doc = std::move(doc);
    return cfg;
}

json to_json(const ExperimentReport& r) {
    return {{"command", r.command}, {"config", r.config}, {"summary", r.summary},
            {"rows", r.rows},       {"timings", r.timings}, {"exit_code", r.exit_code}};
}

std::string rows_csv(const ExperimentReport& r) {
    std::vector<std::string> columns;
    for (const auto& row : r.rows) {
        for (const auto& [key, _] : row.items()) {
            if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
        }
    }
    std::ostringstream os;
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            os << (c ? "," : "");
            if (row.contains(columns[c])) os << csv_cell(row.at(columns[c]));
        }
        os << '\n';
    }
    return os.str();
}

void write_report(const ExperimentReport& r, const std::string& out_dir, const std::string& format) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base = std::filesystem::path(out_dir) / r.command;
    if (format == "json" || format == "both") {
        std::ofstream out(base.string() + ".json");
        out << to_json(r).dump(2) << '\n';
    }
    if (format == "csv" || format == "both") {
        std::ofstream out(base.string() + ".csv");
        out << rows_csv(r);
    }
}

double resolve_b(const RunConfig& cfg, const Instance& inst, json& note) {
    auto policy = get_or<std::string>(cfg.doc, "b_policy", "certified_from_kappa");
    if (policy == "certified_from_kappa" && !inst.kernel.symmetric()) {
        config_require(inst.kernel.size() <= kExhaustiveLimit,
                       "non-symmetric kernel: use b_policy user or exhaustive_lp with n <= 16");
        policy = "exhaustive_lp";
    }
    note["b_policy"] = policy;
    if (policy == "user") {
        const double b = num_or(cfg.doc, "b", 1.0);
        config_require(b >= 1.0 && std::isfinite(b), "b must be finite and >= 1");
        return b;
    }
    if (policy == "exhaustive_lp") {
        config_require(inst.kernel.size() <= kExhaustiveLimit, "exhaustive_lp needs n <= 16");
        const WmpReport r = verify_wmp(inst.kernel, inst.space, 1.0, {WmpStrategy::exhaustive_lp});
        note["minimal_b"] = number_to_json(*r.minimal_b);
        config_require(std::isfinite(*r.minimal_b), "kernel fails the maximum principle for every finite b");
        return *r.minimal_b;
    }
    const QuasiMetricReport q = quasimetric_constant(inst.kernel);
    note["kappa"] = number_to_json(q.kappa);
    config_require(std::isfinite(q.kappa), "quasi-metric constant is infinite (zero diagonal or zero entries)");
    return certified_b(q);
}

ExperimentReport cmd_certify(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    ExperimentReport rep;
    rep.command = "certify";
    rep.config = cfg.doc;
    const Instance inst = load_instance(cfg);
    const std::size_t n = inst.space.size();
    rep.summary["n"] = n;

    std::optional<double> b;
    std::optional<double> b_dom;
    if (inst.kernel.symmetric()) {
        const auto t1 = Clock::now();
        const QuasiMetricReport q = quasimetric_constant(inst.kernel);
        rep.timings["kappa_ms"] = ms_since(t1);
        rep.summary["quasimetric"] = to_json(q);
        rep.summary["b_plain"] = number_to_json(certified_b(q, KernelTransform::plain));
        rep.summary["b_w_modified"] = number_to_json(certified_b(q, KernelTransform::w_modified));
        if (n <= 200) {
            const auto t2 = Clock::now();
            const PtolemyReport p = ptolemy_constant(inst.kernel);
            rep.timings["ptolemy_ms"] = ms_since(t2);
            rep.summary["ptolemy"] = to_json(p);
            rep.summary["ptolemy_within_4kappa2"] = p.constant <= 4.0 * q.kappa * q.kappa + 1e-9;
        }
        if (std::isfinite(q.kappa)) {
            b = certified_b(q);
            b_dom = certified_b(q, KernelTransform::w_modified);
        }
    }
    if (cfg.doc.contains("b")) b = b_dom = num_or(cfg.doc, "b", 1.0);
    if (!b) {
        config_require(n <= kExhaustiveLimit, "non-symmetric kernel with n > 16: supply b");
        b = 1.0;
    }
    const json wdesc = cfg.doc.value("wmp", json::object());
    WmpOptions opt;
    opt.budget = get_or<std::size_t>(wdesc, "budget", opt.budget);
    opt.seed = cfg.seed;
    const auto t3 = Clock::now();
    const WmpReport w = verify_wmp(inst.kernel, inst.space, *b, opt);
    rep.timings["wmp_ms"] = ms_since(t3);
    rep.summary["wmp"] = to_json(w);
    bool violated = w.verdict == WmpReport::Verdict::violated;

    if (cfg.doc.contains("h")) {
        const Vector h = make_h(cfg.doc.at("h"), inst, cfg.seed);
        const double bd = b_dom.value_or(*b);
        const WmpReport d = verify_domination(inst.kernel, inst.space, h, bd, opt);
        rep.summary["domination"] = to_json(d);
        rep.summary["domination_b"] = number_to_json(bd);
        if (d.minimal_b && *d.minimal_b < bd - 1e-9) rep.summary["domination_smaller_constant_suffices"] = true;
        violated = violated || d.verdict == WmpReport::Verdict::violated;
    }
    const Vector g1 = apply(inst.kernel, inst.space, Vector(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        json row = space_row(inst.space, i);
        row["g1"] = number_to_json(g1[i]);
        rep.rows.push_back(row);
    }
    rep.exit_code = violated ? exit_code::principle_violation : exit_code::ok;
    rep.timings["total_ms"] = ms_since(t0);
    return rep;
}

ExperimentReport cmd_verify_bounds(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    ExperimentReport rep;
    rep.command = "verify-bounds";
    rep.config = cfg.doc;
    const Instance inst = load_instance(cfg);
    const std::size_t n = inst.space.size();
    const Nonlinearity g = load_nonlinearity(cfg.doc);
    const Vector h = make_h(cfg.doc.value("h", json{{"kind", "one"}}), inst, cfg.seed);
    const SolveOptions opt = solve_options(cfg.doc);
    json note;
    const double b = resolve_b(cfg, inst, note);
    rep.summary["b"] = b;
    rep.summary["b_source"] = note;
    rep.summary["nonlinearity"] = g.describe();

    const auto t1 = Clock::now();
    const SolveResult sol = g.increasing() ? picard_increasing(inst.kernel, inst.space, g, h, opt)
                                           : picard_decreasing(inst.kernel, inst.space, g, h, opt);
    rep.timings["solve_ms"] = ms_since(t1);

    BoundReport report;
    if (g.is_power()) {
        Vector hq(n);
        for (std::size_t i = 0; i < n; ++i) hq[i] = std::pow(h[i], g.q());
        const Vector pot = apply(inst.kernel, inst.space, hq);
        report = power_bound_report(pot, h, b, g.q(), sol.u);
    } else {
        config_require(std::all_of(h.begin(), h.end(), [](double v) { return v == 1.0; }),
                       "general nonlinearities support h = 1 only");
        const Vector pot = apply(inst.kernel, inst.space, Vector(n, 1.0));
        report.theorem = g.increasing() ? "lower_general" : "upper_general";
        report.nonlinearity = g.describe();
        report.b = b;
        report.lower = g.increasing();
        report.rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& row = report.rows[i];
            row.pot = pot[i];
            row.value = g.increasing() ? lower_bound_general(pot[i], b, g) : upper_bound_general(pot[i], b, g);
            row.reference = sol.u[i];
            row.margin = report.lower ? sol.u[i] - row.value.bound : row.value.bound - sol.u[i];
        }
    }
    // Margins only count where the reference solution exists.
    std::size_t condition_failures = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = report.rows[i];
        const bool usable = sol.status[i] == PointStatus::converged && (report.lower || sol.u[i] > 0.0);
        if (!usable) {
            row.margin.reset();
            row.reference.reset();
        } else if (!report.lower && row.value.condition == Condition::violated) {
            ++condition_failures;
        }
    }
    const std::size_t violations = report.violations();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = report.rows[i];
        json r = space_row(inst.space, i);
        r["pot"] = number_to_json(row.pot);
        r["h"] = row.h;
        r["u"] = number_to_json(sol.u[i]);
        r["status"] = to_string(sol.status[i]);
        r["bound"] = number_to_json(row.value.bound);
        r["condition"] = to_string(row.value.condition);
        r["margin"] = row.margin ? number_to_json(*row.margin) : json(nullptr);
        rep.rows.push_back(r);
    }
    rep.summary["theorem"] = report.theorem;
    rep.summary["min_margin"] = number_to_json(report.min_margin());
    rep.summary["violations"] = violations;
    rep.summary["necessary_condition_failures"] = condition_failures;
    rep.summary["iterations"] = sol.iterations;
    rep.summary["converged"] = sol.count(PointStatus::converged);
    rep.summary["diverged"] = sol.count(PointStatus::diverged);
    rep.summary["oscillating"] = sol.count(PointStatus::oscillating);
    rep.summary["no_positive_solution"] = sol.count(PointStatus::no_positive_solution);
    rep.exit_code = violations + condition_failures > 0 ? exit_code::bound_violation : exit_code::ok;
    rep.timings["total_ms"] = ms_since(t0);
    return rep;
}

SharpnessResult sharpness_run(double x_end, std::size_t n, double q) {
    const Vector w = trapezoid_weights(0.0, x_end, n);
    std::vector<Coords> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = {x_end * static_cast<double>(i) / static_cast<double>(n - 1)};
    const MeasureSpace space(w, coords);
    const Kernel k = volterra_kernel(space);
    const Nonlinearity g = Nonlinearity::power(q);
    const SolveResult sol = picard_increasing(k, space, g, Vector(n, 1.0));
    const Vector g1 = apply(k, space, Vector(n, 1.0));

    SharpnessResult out;
    out.step = x_end / static_cast<double>(n - 1);
    out.x.resize(n);
    out.u = sol.u;
    out.bound.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.x[i] = coords[i][0];
        out.bound[i] = lower_bound_power(g1[i], 1.0, q).bound;
        if (sol.status[i] != PointStatus::converged) {
            ++out.violations;
            continue;
        }
        const double gap = (sol.u[i] - out.bound[i]) / out.bound[i];
        out.sup_rel_gap = std::max(out.sup_rel_gap, std::abs(gap));
        if (sol.u[i] - out.bound[i] < -1e-9 * (1.0 + std::abs(sol.u[i]))) ++out.violations;
    }
    return out;
}

ExperimentReport cmd_sharpness(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    ExperimentReport rep;
    rep.command = "sharpness";
    rep.config = cfg.doc;
    const json s = cfg.doc.value("sharpness", json::object());
    const double x_end = num_or(s, "x_end", 0.9);
    const auto n = get_or<std::size_t>(s, "n", 1000);
    const double q = num_or(s, "q", 1.0);
    config_require(x_end > 0.0 && n >= 2 && q > 0.0, "sharpness needs x_end > 0, n >= 2, q > 0");
    const SharpnessResult coarse = sharpness_run(x_end, n, q);
    const SharpnessResult fine = sharpness_run(x_end, 2 * n - 1, q);
    for (std::size_t i = 0; i < coarse.x.size(); ++i) {
        rep.rows.push_back({{"point", i},
                            {"x0", coarse.x[i]},
                            {"u", number_to_json(coarse.u[i])},
                            {"bound", number_to_json(coarse.bound[i])},
                            {"gap", number_to_json(coarse.u[i] - coarse.bound[i])}});
    }
    rep.summary = {{"step", coarse.step},
                   {"sup_rel_gap", coarse.sup_rel_gap},
                   {"half_step", fine.step},
                   {"half_step_sup_rel_gap", fine.sup_rel_gap},
                   {"gap_reduction", coarse.sup_rel_gap / fine.sup_rel_gap},
                   {"violations", coarse.violations + fine.violations}};
    rep.exit_code = coarse.violations + fine.violations > 0 ? exit_code::bound_violation : exit_code::ok;
    rep.timings["total_ms"] = ms_since(t0);
    return rep;
}

ExperimentReport cmd_lemma_suite(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    ExperimentReport rep;
    rep.command = "lemmas";
    rep.config = cfg.doc;
    const Instance inst = load_instance(cfg);
    const std::size_t n = inst.space.size();
    json note;
    const double b = resolve_b(cfg, inst, note);
    rep.summary["b"] = b;
    rep.summary["b_source"] = note;
    const json ls = cfg.doc.value("lemmas", json::object());
    const auto trials = get_or<std::size_t>(ls, "trials", 100);
    const auto depth = get_or<std::size_t>(ls, "depth", 4);
    const Nonlinearity g = load_nonlinearity(cfg.doc);
    constexpr double tol = -1e-9;
    bool all_pass = true;
    auto add = [&](const std::string& check, const json& param, double worst, std::size_t count) {
        const bool pass = worst >= tol;
        all_pass = all_pass && pass;
        rep.rows.push_back({{"check", check}, {"param", param}, {"min_residual", number_to_json(worst)},
                            {"trials", count}, {"pass", pass}});
    };

    std::mt19937_64 rng(cfg.seed);
    for (double r : {1.5, 2.0, 3.0}) {
        const ScalarFn phi = [r](double t) { return std::pow(t, r - 1.0); };
        double worst = kInf;
        for (std::size_t t = 0; t < trials; ++t) {
            Vector f(n);
            for (auto& v : f) v = std::floor(8.0 * uniform(rng));  // ties exercise the sublevel sets
            worst = std::min(worst, layer_cake_check(inst.space, f, phi).residual);
        }
        add("layer_cake", {{"r", r}}, worst, trials);
    }

    const Vector g1 = apply(inst.kernel, inst.space, Vector(n, 1.0));
    for (double p : {0.0, 1.0, 2.0}) {
        const ScalarFn phi = [p](double t) { return std::pow(t, p); };
        double worst = kInf;
        for (std::size_t x = 0; x < n; ++x) {
            if (!std::isfinite(g1[x])) continue;
            worst = std::min(worst, key_lemma_check(inst.kernel, inst.space, b, phi, x).residual);
        }
        add("key_lemma", {{"phi_power", p}}, worst, n);
    }

    const PsiCheck psi = iter_psi_check(inst.kernel, inst.space, g, b, depth);
    add("iter_psi", {{"g", g.describe()}, {"depth", depth}}, psi.min_residual, n);

    for (double r : {0.5, 2.0, 3.0}) {
        const Vector res = power_iterate_inequality_check(inst.kernel, inst.space, r, b);
        add("power_iterate", {{"r", r}}, *std::min_element(res.begin(), res.end()), n);
    }

    if (g.is_power() && g.q() > 0.0) {
        const double q = g.q();
        const IterationTrace tr = iterate_f(inst.kernel, inst.space, [q](double t) { return std::pow(t, q); }, depth);
        double worst = kInf;
        for (std::size_t k = 0; k <= depth; ++k) {
            for (std::size_t x = 0; x < n; ++x) {
                const IteratedBound ib = iterated_power_bound(tr.levels[0][x], b, q, static_cast<int>(k));
                const double fk = tr.levels[k][x];
                if (ib.overflow || !std::isfinite(fk)) continue;
                worst = std::min(worst, (fk - ib.value) / (1.0 + fk));
            }
        }
        add("iterated_power_bound", {{"q", q}, {"depth", depth}}, worst, n);
    }
    rep.summary["all_pass"] = all_pass;
    rep.exit_code = all_pass ? exit_code::ok : exit_code::principle_violation;
    rep.timings["total_ms"] = ms_since(t0);
    return rep;
}

ExperimentReport cmd_solve(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    ExperimentReport rep;
    rep.command = "solve";
    rep.config = cfg.doc;
    const Instance inst = load_instance(cfg);
    const std::size_t n = inst.space.size();
    const SolveOptions opt = solve_options(cfg.doc);
    SolveResult sol;
    if (get_or<bool>(cfg.doc, "homogeneous", false)) {
        const Nonlinearity g = load_nonlinearity(cfg.doc);
        config_require(g.is_power() && g.q() > 0.0 && g.q() < 1.0, "homogeneous solve needs power q in (0, 1)");
        sol = homogeneous_picard(inst.kernel, inst.space, g.q(), {}, opt);
        rep.summary["problem"] = "homogeneous";
    } else {
        const Nonlinearity g = load_nonlinearity(cfg.doc);
        const Vector h = make_h(cfg.doc.value("h", json{{"kind", "one"}}), inst, cfg.seed);
        sol = g.increasing() ? picard_increasing(inst.kernel, inst.space, g, h, opt)
                             : picard_decreasing(inst.kernel, inst.space, g, h, opt);
        rep.summary["problem"] = g.increasing() ? "increasing" : "decreasing";
    }
    for (std::size_t i = 0; i < n; ++i) {
        json r = space_row(inst.space, i);
        r["u"] = number_to_json(sol.u[i]);
        r["status"] = to_string(sol.status[i]);
        r["residual"] = number_to_json(sol.defect[i]);
        rep.rows.push_back(r);
    }
    rep.summary["iterations"] = sol.iterations;
    rep.summary["residual"] = number_to_json(sol.residual);
    rep.summary["converged"] = sol.count(PointStatus::converged);
    rep.timings["total_ms"] = ms_since(t0);
    return rep;
}

ExperimentReport cmd_kernel_export(const RunConfig& cfg) {
    ExperimentReport rep;
    rep.command = "kernel-export";
    rep.config = cfg.doc;
    const Instance inst = load_instance(cfg);
    rep.summary = space_kernel_to_json(inst.space, inst.kernel);
    for (std::size_t i = 0; i < inst.space.size(); ++i) rep.rows.push_back(space_row(inst.space, i));
    return rep;
}

ExperimentReport run_command(const RunConfig& cfg) {
    const std::string& c = cfg.command;
    if (c == "certify") return cmd_certify(cfg);
    if (c == "verify-bounds") return cmd_verify_bounds(cfg);
    if (c == "sharpness") return cmd_sharpness(cfg);
    if (c == "lemmas") return cmd_lemma_suite(cfg);
    if (c == "solve") return cmd_solve(cfg);
    if (c == "kernel-export") return cmd_kernel_export(cfg);
    throw ConfigError("unknown command: " + c);
}

}  // namespace potlab
