#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "potlab/harness.hpp"
#include "potlab/serialize.hpp"
#include "support.hpp"

using namespace potlab;
using doctest::Approx;

TEST_CASE("extended numbers round-trip through JSON") {
    CHECK(number_to_json(kInf) == "inf");
    CHECK(number_to_json(-kInf) == "-inf");
    CHECK(std::isinf(number_from_json("inf")));
    CHECK(std::isnan(number_from_json(json(nullptr))));
    CHECK(number_from_json(number_to_json(0.1)) == 0.1);
    CHECK_THROWS_AS(number_from_json("abc"), InvalidArgument);
    const Vector v = {1.0, kInf, 0.0};
    CHECK(vector_from_json(vector_to_json(v)) == v);
}

TEST_CASE("space and kernel round-trip") {
    std::mt19937_64 rng(1);
    const MeasureSpace sp = testutil::random_cloud(rng, 5, 2);
    const Kernel k = riesz_kernel(sp, 1.0, 2, DiagonalPolicy::singular());
    const auto [sp2, k2] = space_kernel_from_json(json::parse(space_kernel_to_json(sp, k).dump()));
    CHECK(sp2.weights() == sp.weights());
    CHECK(sp2.coords() == sp.coords());
    CHECK(k2.entries() == k.entries());
    CHECK(k2.symmetric());
    CHECK(k2.name() == "riesz");
}

TEST_CASE("nonlinearity round-trip") {
    const Nonlinearity p = nonlinearity_from_json(nonlinearity_to_json(Nonlinearity::power(-2.0)));
    CHECK(p.is_power());
    CHECK(p.q() == -2.0);
    const auto tab = Nonlinearity::tabulated_increasing({1.0, 2.0, 3.0}, {1.0, 4.0, 9.0});
    const Nonlinearity t = nonlinearity_from_json(json::parse(nonlinearity_to_json(tab).dump()));
    CHECK(t(2.5) == tab(2.5));
    CHECK(t.increasing());
    CHECK_THROWS_AS(nonlinearity_to_json(Nonlinearity::general_increasing([](double s) { return s; })), InvalidArgument);
    CHECK_THROWS_AS(nonlinearity_from_json(json{{"kind", "cubic"}}), InvalidArgument);
}

TEST_CASE("bound report CSV") {
    const BoundReport r = power_bound_report(Vector{0.0, kInf}, Vector{1.0, 1.0}, 1.0, 2.0, Vector{1.0, 5.0});
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("point,pot,bound,condition,margin\n", 0) == 0);
    CHECK(csv.find("inf") != std::string::npos);
    const json j = to_json(r);
    CHECK(j.at("rows").size() == 2);
}

TEST_CASE("trapezoid weights") {
    CHECK(trapezoid_weights(0.0, 1.0, 3) == Vector{0.25, 0.5, 0.25});
    CHECK_THROWS_AS(trapezoid_weights(0.0, 1.0, 1), InvalidArgument);
}

TEST_CASE("instances are deterministic in the seed") {
    const json desc = {{"space", {{"kind", "random"}, {"n", 12}, {"dim", 2}}},
                       {"kernel", {{"family", "riesz"}, {"alpha", 1.0}}}};
    const Instance a = generate_instance(desc, 7);
    const Instance b = generate_instance(desc, 7);
    const Instance c = generate_instance(desc, 8);
    CHECK(a.kernel.entries() == b.kernel.entries());
    CHECK(a.space.coords() == b.space.coords());
    CHECK(a.space.coords() != c.space.coords());
    CHECK(a.kernel.symmetric());

    for (std::uint64_t s = 0; s < 40; ++s) {
        const Instance r1 = random_sweep_instance(s);
        const Instance r2 = random_sweep_instance(s);
        CHECK(r1.kernel.entries() == r2.kernel.entries());
        CHECK(r1.space.size() <= 64);
        const Vector g1 = unit_potential(r1.kernel, r1.space);
        const double m = *std::max_element(g1.begin(), g1.end());
        CHECK(m >= 0.1 - 1e-12);
        CHECK(m <= 2.0 + 1e-12);
    }
}

TEST_CASE("grid spaces") {
    const Instance g = generate_instance({{"space", {{"kind", "grid"}, {"n", 3}, {"dim", 2}}},
                                          {"kernel", {{"family", "radial"}, {"profile", "constant"}}}},
                                         1);
    CHECK(g.space.size() == 9);
    CHECK(g.space.total_mass() == Approx(1.0));
    CHECK(g.space.weight(4) == Approx(0.25));
    CHECK_THROWS_AS(generate_instance({{"space", {{"kind", "sphere"}}}}, 1), ConfigError);
    CHECK_THROWS_AS(generate_instance({{"kernel", {{"family", "bessel"}}}}, 1), ConfigError);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(load_config(json{{"colour", 1}}), ConfigError);
    CHECK_THROWS_AS(load_config(json{{"format", "xml"}}), ConfigError);
    CHECK_THROWS_AS(load_config(json{{"b_policy", "user"}}), ConfigError);
    CHECK_THROWS_AS(load_config(json::array()), ConfigError);
    const RunConfig cfg = load_config(json{{"command", "solve"}, {"seed", 3}});
    CHECK(cfg.seed == 3);
    CHECK(cfg.format == "json");
    CHECK_THROWS_AS(run_command(load_config(json{{"command", "dance"}})), ConfigError);
}

TEST_CASE("zero kernel makes every bound tight") {
    RunConfig cfg = load_config(json{{"command", "verify-bounds"},
                                     {"space", {{"kind", "grid"}, {"n", 5}}},
                                     {"kernel", {{"family", "zero"}}},
                                     {"nonlinearity", {{"kind", "power"}, {"q", 2.0}}},
                                     {"b_policy", "user"},
                                     {"b", 1.0}});
    const ExperimentReport r = run_command(cfg);
    CHECK(r.exit_code == exit_code::ok);
    CHECK(r.summary.at("violations") == 0);
    for (const auto& row : r.rows) CHECK(number_from_json(row.at("margin")) == 0.0);
}

TEST_CASE("commands on a small instance") {
    const json base = {{"space", {{"kind", "grid"}, {"n", 8}}},
                       {"kernel", {{"family", "riesz"}, {"alpha", 0.5}, {"normalize_max_g1", 0.5}}},
                       {"nonlinearity", {{"kind", "power"}, {"q", 1.5}}}};
    json c = base;
    c["command"] = "certify";
    const ExperimentReport cert = run_command(load_config(c));
    CHECK(cert.exit_code == exit_code::ok);
    CHECK(cert.summary.at("wmp").at("verdict") == "certified");

    c["command"] = "verify-bounds";
    const ExperimentReport vb = run_command(load_config(c));
    CHECK(vb.exit_code == exit_code::ok);
    CHECK(vb.summary.at("violations") == 0);

    c["command"] = "lemmas";
    c["lemmas"] = {{"trials", 20}, {"depth", 3}};
    const ExperimentReport lm = run_command(load_config(c));
    CHECK(lm.summary.at("all_pass") == true);
    CHECK(lm.exit_code == exit_code::ok);

    c = base;
    c["command"] = "solve";
    c["homogeneous"] = true;
    c["nonlinearity"] = {{"kind", "power"}, {"q", 0.5}};
    const ExperimentReport sv = run_command(load_config(c));
    CHECK(sv.summary.at("converged") == 8);

    c = base;
    c["command"] = "kernel-export";
    const ExperimentReport ke = run_command(load_config(c));
    const auto [sp, k] = space_kernel_from_json(ke.summary);
    CHECK(sp.size() == 8);

    c = base;
    c["command"] = "certify";
    c["kernel"] = {{"family", "custom"}, {"data", ke.summary}};
    CHECK(run_command(load_config(c)).exit_code == exit_code::ok);
}

TEST_CASE("certify checks domination for h = K nu at 8 kappa^3") {
    const json doc = {{"command", "certify"},
                      {"space", {{"kind", "grid"}, {"n", 9}}},
                      {"kernel", {{"family", "riesz"}, {"alpha", 0.5}}},
                      {"h", {{"kind", "potential"}}}};
    const ExperimentReport r = run_command(load_config(doc));
    CHECK(r.exit_code == exit_code::ok);
    const double kappa = number_from_json(r.summary.at("quasimetric").at("kappa"));
    CHECK(number_from_json(r.summary.at("domination_b")) == doctest::Approx(8.0 * kappa * kappa * kappa).epsilon(1e-14));
    CHECK(r.summary.at("domination").at("verdict") == "certified");
    json bad = doc;
    bad["kernel"] = {{"family", "zero"}};
    CHECK_THROWS_AS(run_command(load_config(bad)), ConfigError);
}

TEST_CASE("principle violations map to their exit code") {
    const json doc = {{"command", "certify"},
                      {"space", {{"kind", "grid"}, {"n", 4}}},
                      {"kernel", {{"family", "riesz"}, {"alpha", 0.5}, {"diagonal", "cap"}, {"ceiling", 0.1}}},
                      {"b", 1.0}};
    CHECK(run_command(load_config(doc)).exit_code == exit_code::principle_violation);
}

TEST_CASE("reports are written to disk") {
    const auto dir = std::filesystem::temp_directory_path() / "potlab_report_test";
    std::filesystem::remove_all(dir);
    ExperimentReport r;
    r.command = "solve";
    r.rows = json::array({{{"point", 0}, {"u", 1.5}}, {{"point", 1}, {"u", "inf"}, {"status", "diverged"}}});
    write_report(r, dir.string(), "both");
    CHECK(std::filesystem::exists(dir / "solve.json"));
    std::ifstream in(dir / "solve.csv");
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    CHECK(header == "point,u,status");
    CHECK(first == "0,1.5,");
    CHECK(second == "1,inf,diverged");
    std::filesystem::remove_all(dir);
}

TEST_CASE("sharpness run on a coarse grid") {
    const SharpnessResult s = sharpness_run(0.9, 100, 1.0);
    CHECK(s.violations == 0);
    CHECK(s.sup_rel_gap > 0.0);
    CHECK(s.sup_rel_gap < 0.01);
}
