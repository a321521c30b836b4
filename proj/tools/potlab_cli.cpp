// potlab: experiments on discrete kernels, maximum principles and pointwise
// bounds for nonlinear integral inequalities.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "potlab/harness.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool quiet = false;
};

int run(const std::string& command, const Flags& flags) {
    using namespace potlab;
    json doc = json::object();
    if (!flags.config.empty()) {
        std::ifstream in(flags.config);
        if (!in) {
            std::cerr << "error: cannot open config " << flags.config << '\n';
            return exit_code::config_error;
        }
        try {
            in >> doc;
        } catch (const json::exception& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << '\n';
            return exit_code::config_error;
        }
    }
    doc["command"] = command;
    if (flags.seed) doc["seed"] = *flags.seed;
    if (flags.out) doc["out"] = *flags.out;
    if (flags.format) doc["format"] = *flags.format;

    try {
        const RunConfig cfg = load_config(doc);
        const ExperimentReport rep = run_command(cfg);
        write_report(rep, cfg.out_dir, cfg.format);
        if (!flags.quiet) std::cout << rep.summary.dump(2) << '\n';
        return rep.exit_code;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"potlab: kernels, maximum principles and bounds for nonlinear integral inequalities"};
    app.require_subcommand(1);
    Flags flags;
    std::uint64_t seed = 0;
    std::string out, format;

    const std::pair<const char*, const char*> commands[] = {
        {"certify", "quasi-metric and Ptolemy constants, certified b, maximum-principle check"},
        {"verify-bounds", "solve the integral equation and check the pointwise bound at every point"},
        {"sharpness", "Volterra kernel: gap between the minimal solution and the lower bound"},
        {"lemmas", "layer-cake, key-lemma, iteration and power inequalities"},
        {"solve", "Picard solution of the configured problem"},
        {"kernel-export", "write the generated space and kernel as JSON"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--out", out, "output directory (overrides the config)");
        sub->add_option("--format", format, "json, csv or both (overrides the config)")
            ->check(CLI::IsMember({"json", "csv", "both"}));
        sub->add_flag("--quiet", flags.quiet, "do not print the summary");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : potlab::exit_code::config_error;
    }

    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--seed")) flags.seed = seed;
        if (sub->count("--out")) flags.out = out;
        if (sub->count("--format")) flags.format = format;
        return run(sub->get_name(), flags);
    }
    return potlab::exit_code::config_error;
}
