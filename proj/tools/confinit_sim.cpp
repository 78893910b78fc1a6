// confinit_sim: run a CONFINIT scenario over a range of seeds and write the
// CSV reports.
//
//   confinit_sim --config scenario.conf --runs 35 --seed 1 --out results/
//   confinit_sim --nodes 100 --attackers-pct 20 --no-detection --out baseline/

#include "confinit/config.hpp"
#include "confinit/sweep.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

int main(int argc, char** argv)
{
    using namespace confinit;

    CLI::App app{"CONFINIT IIoT clustering and FDI-detection simulator"};
    std::string config_path;
    ConfigOverrides overrides;
    std::uint32_t nodes = 0;
    double attackers_pct = 0.0;
    std::string attack;
    std::uint32_t runs = 35;
    std::uint64_t seed = 1;
    bool no_detection = false;
    std::string trace_path;
    std::string out_dir = "out";
    unsigned jobs = 0;

    app.add_option("--config", config_path, "Scenario file (key = value)");
    auto* nodes_opt = app.add_option("--nodes", nodes, "Number of nodes")->check(CLI::PositiveNumber);
    auto* pct_opt = app.add_option("--attackers-pct", attackers_pct, "Attacker share in percent")->check(CLI::Range(0.0, 100.0));
    auto* attack_opt =
        app.add_option("--attack", attack, "Attack model")->check(CLI::IsMember({"fdi", "churn", "sensitive"}));
    app.add_option("--runs", runs, "Number of seeds to run")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "First seed of the sweep");
    app.add_flag("--no-detection", no_detection, "Disable fault management (baseline mode)");
    auto* trace_opt = app.add_option("--trace", trace_path, "Reading trace CSV (round,node_id,value)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--jobs", jobs, "Parallel runs (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    if (*nodes_opt) overrides.nodes = nodes;
    if (*pct_opt) overrides.attackers_pct = attackers_pct;
    if (*attack_opt) overrides.attack = parse_attack_type(attack);
    if (no_detection) overrides.detection_enabled = false;
    if (*trace_opt) overrides.trace_path = trace_path;

    SweepOptions opts;
    try {
        if (config_path.empty()) {
            std::istringstream empty;
            opts.scenario = parse_config(empty, overrides);
        } else {
            opts.scenario = parse_config(std::filesystem::path(config_path), overrides);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    opts.runs = runs;
    opts.base_seed = *seed_opt ? seed : opts.scenario.seed;
    opts.out_dir = out_dir;
    opts.jobs = jobs;

    const int code = run_sweep(opts, std::cerr);
    if (code == exit_ok) {
        std::cout << "wrote " << runs << " run(s) of " << scenario_id(opts.scenario) << " to " << out_dir << '\n';
    }
    return code;
}
