// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Tolerances are pinned below.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "confinit/clustering.hpp"
#include "confinit/detection.hpp"
#include "confinit/engine.hpp"
#include "confinit/metrics.hpp"
#include "confinit/sweep.hpp"
#include "confinit/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace confinit;
namespace fs = std::filesystem;

namespace {

constexpr double kGoldenTol = 1e-9;
constexpr double kSdTol = 1e-6;
constexpr std::uint32_t kSeeds = 35;

struct Line {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<Line> results;

void report(std::string name, bool pass, std::string detail)
{
    std::printf("%-26s %s  %s\n", name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    results.push_back({std::move(name), pass, std::move(detail)});
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("NA"); }

bool at_least(const std::optional<double>& v, double bound) { return v && *v >= bound; }
bool at_most(const std::optional<double>& v, double bound) { return v && *v <= bound; }

std::vector<NeighborRecord> unit_weight(std::initializer_list<double> aggregates)
{
    std::vector<NeighborRecord> out;
    std::uint32_t id = 100;
    for (double a : aggregates) out.push_back({node_id(id++), a, a, 1, 0});
    return out;
}

void criterion_golden_arithmetic()
{
    struct Case {
        double own;
        std::vector<NeighborRecord> neighbors;
        double expected;
    };
    const std::vector<Case> cases{
        // second exchange
        {15, unit_weight({16}), 15.5},
        {16, unit_weight({15, 18}), 49.0 / 3},
        {18, unit_weight({16, 16, 16, 17}), (18.0 + 16 + 16 + 16 + 17) / 5},
        {17, unit_weight({16, 18}), 51.0 / 3},
        {16, unit_weight({17, 18}), 51.0 / 3},
        // third exchange
        {20, unit_weight({22, 21, 23}), 86.0 / 4},
        {22, unit_weight({20, 23}), 65.0 / 3},
        {23, unit_weight({22, 20}), 65.0 / 3},
        {21, unit_weight({24, 20}), 65.0 / 3},
        {24, unit_weight({21}), 22.5},
    };
    double worst = 0;
    for (const auto& c : cases) worst = std::max(worst, std::abs(aggregate_reading(c.own, c.neighbors) - c.expected));
    report("AC1 golden-arithmetic", worst <= kGoldenTol, "max |err| = " + std::to_string(worst) + " over 10 values");
}

void criterion_golden_scenario()
{
    const fs::path trace = fs::temp_directory_path() / "confinit_acceptance_fig8.csv";
    {
        std::ofstream out(trace);
        out << "round,node_id,value\n";
        const double readings[] = {14, 15, 16, 16, 17, 18};
        for (Round r = 0; r < 6; ++r) {
            for (std::uint32_t i = 0; i < 6; ++i) out << r << ',' << i << ',' << readings[i] << '\n';
        }
    }
    ScenarioConfig cfg;
    cfg.n_nodes = 6;
    cfg.n_rounds = 6;
    cfg.tx_radius_m = 50;
    cfg.positions = std::vector<Point>{{0, 0}, {10, 0}, {20, 0}, {0, 10}, {10, 10}, {20, 10}};
    cfg.attackers = std::vector<NodeId>{node_id(2)};
    cfg.attack.fdi_offset_min = 29;
    cfg.attack.fdi_offset_max = 29;
    cfg.attack.forge_sign = ForgeSign::positive;
    cfg.trace_path = trace;
    const NodeId c = node_id(2);

    Simulation sim(cfg);
    std::vector<std::string> problems;
    auto events_of = [&](EventType type, Round round) {
        return std::count_if(sim.events().begin(), sim.events().end(), [&](const Event& e) {
            return e.type == type && e.round == round && e.subject == c;
        });
    };

    sim.run_round();
    if (events_of(EventType::suspect_added, 0) != 5) problems.push_back("suspect_added@0");
    const auto cls = classify_suspect(consensus_region(sim.world().nodes[3], 16, c), 45, cfg.detection);
    const double sd1 = cls.region_sd;
    const double sd2 = cls.combined_sd.value_or(-1);
    if (std::abs(sd1 - std::sqrt(2.0)) > kSdTol) problems.push_back("region sd");
    if (std::abs(sd2 - 10.884494578170465) > kSdTol) problems.push_back("combined sd");

    sim.run_round();
    if (events_of(EventType::attacker_detected, 1) == 0) problems.push_back("attacker_detected@1");

    sim.run_round();
    for (NodeId leader : sim.snapshots().back().all_leaders()) {
        if (!is_blacklisted(sim.world().nodes[to_index(leader)], c)) problems.push_back("leader unaware@2");
    }
    while (!sim.finished()) sim.run_round();
    for (const auto& snap : sim.snapshots()) {
        if (snap.cluster_of(c)) problems.push_back("n_c clustered@" + std::to_string(snap.round));
    }
    fs::remove(trace);

    std::string detail = "sd=" + fmt(sd1) + " combined=" + fmt(sd2);
    for (const auto& p : problems) detail += " [" + p + "]";
    report("AC2 golden-scenario", problems.empty(), detail);
}

AggregateReport sweep(ScenarioConfig cfg)
{
    SweepOptions opts;
    opts.scenario = std::move(cfg);
    opts.runs = kSeeds;
    opts.base_seed = 1;
    opts.jobs = 0;
    const auto runs = run_seeds(opts);
    std::vector<MetricsReport> reports;
    for (const auto& r : runs) reports.push_back(r.report);
    return aggregate_runs(reports);
}

void criterion_fdi_grid()
{
    ScenarioConfig cfg;
    cfg.attack.type = AttackType::fdi;
    const auto agg = sweep(cfg);
    const bool pass = at_least(agg.detection_rate.mean, 0.95) && at_most(agg.fpr.mean, 0.05) &&
                      at_most(agg.fnr.mean, 0.05) && at_least(agg.accuracy.mean, 0.90) && at_least(agg.f1.mean, 0.80);
    report("AC3 fdi-grid", pass,
           "dr=" + fmt(agg.detection_rate.mean) + " fpr=" + fmt(agg.fpr.mean) + " fnr=" + fmt(agg.fnr.mean) +
               " acc=" + fmt(agg.accuracy.mean) + " f1=" + fmt(agg.f1.mean));
}

void criterion_churn_sensitive()
{
    bool pass = true;
    std::string detail;
    for (AttackType type : {AttackType::churn, AttackType::sensitive}) {
        ScenarioConfig cfg;
        cfg.attack.type = type;
        const auto agg = sweep(cfg);
        const bool ok = at_least(agg.detection_rate.mean, 0.95) && at_most(agg.fpr.mean, 0.03) &&
                        at_most(agg.fnr.mean, 0.03) && at_least(agg.f1.mean, 0.85);
        pass = pass && ok;
        detail += std::string(to_string(type)) + (ok ? "(ok)" : "(fail)") + ": dr=" + fmt(agg.detection_rate.mean) +
                  " fpr=" + fmt(agg.fpr.mean) + " fnr=" + fmt(agg.fnr.mean) + " f1=" + fmt(agg.f1.mean) + "  ";
    }
    report("AC4 churn+sensitive", pass, detail);
}

void criterion_baseline()
{
    ScenarioConfig cfg;
    cfg.attacker_fraction = 0.20;
    const auto on = sweep(cfg);
    cfg.detection.detection_enabled = false;
    const auto off = sweep(cfg);
    const double a = on.clusters_attacker_free.mean.value_or(0);
    const double b = off.clusters_attacker_free.mean.value_or(0);
    const double ratio = b > 0 ? a / b : 0;
    report("AC5 baseline-comparison", b > 0 && ratio >= 1.25,
           "attacker-free clusters det=" + fmt(a) + " baseline=" + fmt(b) + " ratio=" + fmt(ratio) + " (>=1.25)");
}

void criterion_properties()
{
    doctest::Context ctx;
    ctx.setOption("test-case", "property:*");
    ctx.setOption("minimal", true);
    const int rc = ctx.run();
    report("AC6 property-suites", rc == 0, rc == 0 ? "all 1000-case suites green" : "see doctest output above");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_determinism()
{
    const fs::path root = fs::temp_directory_path() / "confinit_acceptance_det";
    fs::remove_all(root);
    SweepOptions opts;
    opts.scenario.attacker_fraction = 0.10;
    opts.runs = 4;
    opts.base_seed = 11;
    opts.jobs = 0;
    std::ostringstream err;
    opts.out_dir = root / "a";
    const int rc_a = run_sweep(opts, err);
    opts.jobs = 1;
    opts.out_dir = root / "b";
    const int rc_b = run_sweep(opts, err);
    bool same = rc_a == 0 && rc_b == 0;
    std::string detail = "4 seeds, parallel vs serial:";
    for (const char* f : {"summary.csv", "timeseries.csv", "events.csv"}) {
        const auto a = slurp(root / "a" / f);
        const bool eq = !a.empty() && a == slurp(root / "b" / f);
        same = same && eq;
        detail += std::string(" ") + f + (eq ? "=" : "!=");
    }
    fs::remove_all(root);
    report("AC7 determinism", same, detail);
}

}  // namespace

int main()
{
    criterion_golden_arithmetic();
    criterion_golden_scenario();
    criterion_properties();
    criterion_determinism();
    criterion_fdi_grid();
    criterion_churn_sensitive();
    criterion_baseline();

    const auto failed = std::count_if(results.begin(), results.end(), [](const Line& l) { return !l.pass; });
    std::printf("%zu/%zu criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
    return failed == 0 ? 0 : 1;
}
