#pragma once

// Instance generation and the experiment commands behind the CLI.
//
// A run is a single JSON document:
//
//   {"command": "verify-bounds", "seed": 7,
//    "space": {"kind": "grid" | "random", "n": 32, "dim": 1, "lower": 0, "upper": 1},
//    "kernel": {"family": "riesz" | "radial" | "volterra" | "zero" | "custom", ...},
//    "nonlinearity": {"kind": "power", "q": 2},
//    "h": {"kind": "one" | "random" | "constant" | "values", ...},
//    "b_policy": "certified_from_kappa" | "exhaustive_lp" | "user", "b": 2,
//    "solver": {"tol": 1e-12, "max_iter": 100000, "theta": 1},
//    "out": "results", "format": "json" | "csv" | "both"}

#include <cstdint>
#include <string>

#include "potlab/serialize.hpp"

namespace potlab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int bound_violation = 2;
inline constexpr int principle_violation = 3;
inline constexpr int config_error = 4;
}  // namespace exit_code

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct Instance {
    MeasureSpace space;
    Kernel kernel;
    json description;
};

/// Uniform grid with trapezoid weights (half weights at the two ends).
Vector trapezoid_weights(double lower, double upper, std::size_t n);

/// Deterministic in (desc, seed).
Instance generate_instance(const json& desc, std::uint64_t seed);

/// Random grid or point cloud (1-D or 2-D, n <= 64) carrying a Riesz or radial
/// kernel scaled so that max G1 is a random target in [0.1, 2].
Instance random_sweep_instance(std::uint64_t seed);

struct RunConfig {
    json doc;
    std::string command;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string format = "json";
};

/// Fills defaults and validates the top-level keys. Throws ConfigError.
RunConfig load_config(json doc);

struct ExperimentReport {
    std::string command;
    json config;
    json summary = json::object();
    json rows = json::array();
    json timings = json::object();
    int exit_code = exit_code::ok;
};

json to_json(const ExperimentReport& r);
std::string rows_csv(const ExperimentReport& r);
/// Writes <out>/<command>.json and/or <out>/<command>.csv.
void write_report(const ExperimentReport& r, const std::string& out_dir, const std::string& format);

/// The maximum-principle constant selected by the config's b_policy.
double resolve_b(const RunConfig& cfg, const Instance& inst, json& note);

ExperimentReport cmd_certify(const RunConfig& cfg);
ExperimentReport cmd_verify_bounds(const RunConfig& cfg);
ExperimentReport cmd_sharpness(const RunConfig& cfg);
ExperimentReport cmd_lemma_suite(const RunConfig& cfg);
ExperimentReport cmd_solve(const RunConfig& cfg);
ExperimentReport cmd_kernel_export(const RunConfig& cfg);
ExperimentReport run_command(const RunConfig& cfg);

struct SharpnessResult {
    double step = 0.0;
    double sup_rel_gap = 0.0;  // max (u - bound) / bound
    std::size_t violations = 0;
    Vector x;
    Vector u;
    Vector bound;
};

/// Volterra kernel on [0, x_end] with n trapezoid nodes, h = 1, b = 1, g = s^q:
/// the minimal solution against the lower bound.
SharpnessResult sharpness_run(double x_end, std::size_t n, double q);

}  // namespace potlab
