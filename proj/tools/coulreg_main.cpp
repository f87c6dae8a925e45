// Command line front end: runs named verification scenarios and writes one
// JSON report per run. Exit codes: 0 all checks pass, 1 a check failed,
// 2 configuration or usage error.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coulreg/scenario.hpp"

namespace {

const std::vector<std::pair<std::string, std::string>> kSubcommands = {
    {"partition-check", "partition of unity: sum to one, support control, cutoff derivatives"},
    {"jastrow-check", "regularizing fields: decomposition identity, vanishing derivatives, "
                      "transformed-equation residuals, rescaled coefficient bounds"},
    {"scaling-scan", "derivative magnitude scaling exponents along rays into the singular set"},
    {"ball-bounds", "ball-averaged derivative bounds and cluster derivative bounds"},
    {"sobolev-threshold", "weighted square-integrability thresholds for the eigenfunction"},
    {"density-profile", "one-particle density: values, derivatives, pointwise and integrated "
                        "bounds, far-field decay"},
    {"apriori-ratios", "scale-invariant sup-over-mass ratios for the eigenfunction and density"},
};

std::string default_out_dir() {
    if (const char* env = std::getenv("COULREG_OUT_DIR")) return env;
    return ".";
}

void print_report(const coulreg::RunReport& rep) {
    std::cout << "scenario " << rep.scenario << " [" << rep.subcommand << "] seed=" << rep.seed
              << "\n";
    for (const auto& c : rep.checks)
        std::cout << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.anchor
                  << ")" << (c.note.empty() ? "" : "  " + c.note) << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << "  " << rep.checks.size() << " checks, "
              << rep.wall_ms << " ms\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coulreg: empirical checks of derivative bounds for Coulombic eigenfunctions"};
    app.require_subcommand(0, 1);

    std::string config_path, out_path;
    std::uint64_t seed = 0;
    double budget_scale = 1.0;
    bool list_scenarios = false;
    app.add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
    app.add_option("--out", out_path, "report output path (single scenario) or directory");
    app.add_option("--budget-scale", budget_scale, "multiply sample budgets by this factor")
        ->check(CLI::PositiveNumber);
    app.add_flag("--list-scenarios", list_scenarios, "list scenarios and exit");

    for (const auto& [name, desc] : kSubcommands) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (list_scenarios) {
            if (!config_path.empty()) {
                for (const auto& s : coulreg::load_config(config_path))
                    std::cout << s.name << "  (" << s.kind << ")\n";
            } else {
                for (const auto& [name, desc] : kSubcommands)
                    std::cout << "default-" << name << "  (" << name << ")\n";
            }
            return 0;
        }
        auto subs = app.get_subcommands();
        if (subs.empty()) {
            std::cerr << "error: a subcommand is required (see --help)\n";
            return 2;
        }
        const std::string kind = subs[0]->get_name();

        std::vector<coulreg::ScenarioConfig> scenarios;
        if (!config_path.empty()) {
            for (auto& s : coulreg::load_config(config_path))
                if (s.kind == kind) scenarios.push_back(std::move(s));
            if (scenarios.empty())
                throw coulreg::ConfigError("config has no scenario of kind '" + kind + "'");
        } else {
            scenarios.push_back(coulreg::default_scenario(kind));
        }
        if (*seed_opt)
            for (auto& s : scenarios) s.kv["seed"] = std::to_string(seed);

        bool all_pass = true;
        for (const auto& s : scenarios) {
            auto rep = coulreg::run_scenario(s, budget_scale);
            print_report(rep);
            std::filesystem::path target;
            if (!out_path.empty() && scenarios.size() == 1 &&
                !std::filesystem::is_directory(out_path)) {
                target = out_path;
            } else {
                std::filesystem::path dir = out_path.empty() ? default_out_dir() : out_path;
                target = dir / (rep.scenario + ".json");
            }
            coulreg::write_report(rep, target.string());
            std::cout << "report: " << target.string() << "\n";
            all_pass = all_pass && rep.pass;
        }
        return all_pass ? 0 : 1;
    } catch (const coulreg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
