#include "potlab/serialize.hpp"

#include <cmath>
#include <sstream>

namespace potlab {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    if (j.is_null()) return std::nan("");
    throw InvalidArgument("expected a number or \"inf\"");
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (double x : v) out.push_back(number_to_json(x));
    return out;
}

Vector vector_from_json(const json& j) {
    require(j.is_array(), "expected an array of numbers");
    Vector out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(number_from_json(x));
    return out;
}

json space_kernel_to_json(const MeasureSpace& space, const Kernel& kernel) {
    json points = json::array();
    for (const auto& c : space.coords()) points.push_back(vector_to_json(c));
    json entries = json::array();
    for (const auto& row : kernel.rows()) entries.push_back(vector_to_json(row));
    return {{"points", points},
            {"weights", vector_to_json(space.weights())},
            {"kernel", {{"name", kernel.name()}, {"entries", entries}, {"symmetric", kernel.symmetric()}}}};
}

std::pair<MeasureSpace, Kernel> space_kernel_from_json(const json& j) {
    require(j.is_object() && j.contains("weights") && j.contains("kernel"), "space/kernel JSON needs weights and kernel");
    std::vector<Coords> coords;
    if (j.contains("points")) {
        for (const auto& p : j.at("points")) coords.push_back(vector_from_json(p));
    }
    MeasureSpace space(vector_from_json(j.at("weights")), std::move(coords));
    const json& k = j.at("kernel");
    std::vector<Vector> rows;
    for (const auto& r : k.at("entries")) rows.push_back(vector_from_json(r));
    require(rows.size() == space.size(), "kernel size does not match the number of weights");
    Kernel kernel = Kernel::from_rows(rows, k.value("symmetric", false), k.value("name", std::string("custom")));
    return {std::move(space), std::move(kernel)};
}

json nonlinearity_to_json(const Nonlinearity& g) {
    if (g.is_power()) return {{"kind", "power"}, {"q", g.q()}};
    require(g.table().has_value(), "only power and tabulated nonlinearities serialize");
    return {{"kind", g.increasing() ? "general_increasing" : "general_decreasing"},
            {"t", vector_to_json(g.table()->first)},
            {"g", vector_to_json(g.table()->second)}};
}

Nonlinearity nonlinearity_from_json(const json& j) {
    require(j.is_object() && j.contains("kind"), "nonlinearity JSON needs a kind");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "power") return Nonlinearity::power(number_from_json(j.at("q")));
    if (kind == "general_increasing") {
        return Nonlinearity::tabulated_increasing(vector_from_json(j.at("t")), vector_from_json(j.at("g")));
    }
    if (kind == "general_decreasing") {
        return Nonlinearity::tabulated_decreasing(vector_from_json(j.at("t")), vector_from_json(j.at("g")));
    }
    throw InvalidArgument("unknown nonlinearity kind: " + kind);
}

json to_json(const QuasiMetricReport& r) {
    return {{"kappa", number_to_json(r.kappa)}, {"witness_triple", r.witness_triple}, {"vacuous", r.vacuous}};
}

json to_json(const PtolemyReport& r) {
    return {{"constant", number_to_json(r.constant)}, {"witness_quadruple", r.witness_quadruple}, {"vacuous", r.vacuous}};
}

json to_json(const WmpReport& r) {
    json out = {{"verdict", to_string(r.verdict)},
                {"strategy", to_string(r.strategy)},
                {"b_tested", number_to_json(r.b_tested)},
                {"b_lower_witness", number_to_json(r.b_lower_witness)},
                {"problems", r.problems}};
    out["minimal_b"] = r.minimal_b ? number_to_json(*r.minimal_b) : json(nullptr);
    if (r.witness) {
        out["witness"] = {{"support", r.witness->support},
                          {"f", vector_to_json(r.witness->f)},
                          {"x", r.witness->x},
                          {"value", number_to_json(r.witness->value)}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

json to_json(const BoundReport& r) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        rows.push_back({{"point", i},
                        {"pot", number_to_json(row.pot)},
                        {"h", number_to_json(row.h)},
                        {"bound", number_to_json(row.value.bound)},
                        {"condition", to_string(row.value.condition)},
                        {"boundary", row.value.boundary},
                        {"u", row.reference ? number_to_json(*row.reference) : json(nullptr)},
                        {"margin", row.margin ? number_to_json(*row.margin) : json(nullptr)}});
    }
    return {{"theorem", r.theorem},
            {"nonlinearity", r.nonlinearity},
            {"b", number_to_json(r.b)},
            {"direction", r.lower ? "lower" : "upper"},
            {"min_margin", number_to_json(r.min_margin())},
            {"violations", r.violations()},
            {"rows", rows}};
}

json to_json(const SolveResult& r) {
    json status = json::array();
    for (auto s : r.status) status.push_back(to_string(s));
    return {{"u", vector_to_json(r.u)},
            {"iterations", r.iterations},
            {"status", status},
            {"residual", number_to_json(r.residual)},
            {"defect", vector_to_json(r.defect)}};
}

std::string to_csv(const BoundReport& r) {
    std::ostringstream os;
    os << "point,pot,bound,condition,margin\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        os << i << ',' << fmt(row.pot) << ',' << fmt(row.value.bound) << ',' << to_string(row.value.condition) << ','
           << (row.margin ? fmt(*row.margin) : "") << '\n';
    }
    return os.str();
}

std::string to_csv(const SolveResult& r, const MeasureSpace& space) {
    std::ostringstream os;
    const std::size_t d = space.dim();
    os << "point";
    for (std::size_t k = 0; k < d; ++k) os << ",x" << k;
    os << ",u,status,residual\n";
    for (std::size_t i = 0; i < r.u.size(); ++i) {
        os << i;
        for (std::size_t k = 0; k < d; ++k) os << ',' << fmt(space.point(i)[k]);
        os << ',' << fmt(r.u[i]) << ',' << to_string(r.status[i]) << ','
           << (i < r.defect.size() ? fmt(r.defect[i]) : "") << '\n';
    }
    return os.str();
}

}  // namespace potlab
