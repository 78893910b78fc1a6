#include "confinit/sweep.hpp"

#include "confinit/config.hpp"
#include "confinit/text.hpp"

#include <atomic>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <thread>

namespace confinit {

const char* const summary_header =
    "scenario_id,n_nodes,attacker_pct,attack_type,detection_enabled,dr_mean,dr_ci,acc_mean,acc_ci,fpr_mean,fpr_ci,"
    "fnr_mean,fnr_ci,precision_mean,recall_mean,f1_mean,clusters_total_mean,clusters_attacker_free_mean";
const char* const timeseries_header = "run,round,clusters_total,clusters_attacker_free,blacklisted_count";
const char* const events_header = "run,round,event,node,subject,value";
const char* const raw_runs_header =
    "run,seed,tp,tn,fp,fn,attackers_inserted,total_interactions,detection_rate,accuracy,accuracy_pct,fpr,fnr,"
    "precision,recall,f1,clusters_total_mean,clusters_attacker_free_mean,fn_count_paper";

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

}  // namespace

std::vector<RunResult> run_seeds(const SweepOptions& opts)
{
    std::vector<ScenarioConfig> configs(opts.runs, opts.scenario);
    for (std::uint32_t i = 0; i < opts.runs; ++i) configs[i].seed = opts.base_seed + i;
    if (!configs.empty()) configs.front().validate();

    std::vector<RunResult> results(opts.runs);
    std::vector<std::exception_ptr> errors(opts.runs);
    unsigned jobs = opts.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : opts.jobs;
    jobs = std::min<unsigned>(jobs, std::max<std::uint32_t>(opts.runs, 1));

    std::atomic<std::uint32_t> next{0};
    auto worker = [&] {
        for (std::uint32_t i = next++; i < opts.runs; i = next++) {
            try {
                results[i] = run_scenario(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

void write_summary(std::ostream& out, const ScenarioConfig& cfg, const AggregateReport& agg)
{
    out << summary_header << '\n'
        << scenario_id(cfg) << ',' << cfg.n_nodes << ',' << format_double(cfg.attacker_fraction * 100.0) << ','
        << to_string(cfg.attack.type) << ',' << (cfg.detection.detection_enabled ? "true" : "false") << ','
        << cell(agg.detection_rate.mean) << ',' << cell(agg.detection_rate.ci_half_width) << ','
        << cell(agg.accuracy.mean) << ',' << cell(agg.accuracy.ci_half_width) << ',' << cell(agg.fpr.mean) << ','
        << cell(agg.fpr.ci_half_width) << ',' << cell(agg.fnr.mean) << ',' << cell(agg.fnr.ci_half_width) << ','
        << cell(agg.precision.mean) << ',' << cell(agg.recall.mean) << ',' << cell(agg.f1.mean) << ','
        << cell(agg.clusters_total.mean) << ',' << cell(agg.clusters_attacker_free.mean) << '\n';
}

void write_timeseries(std::ostream& out, std::span<const RunResult> runs)
{
    out << timeseries_header << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        for (std::size_t i = 0; i < run.availability.size(); ++i) {
            const auto& p = run.availability[i];
            out << r << ',' << p.round << ',' << p.clusters_total << ',' << p.clusters_attacker_free << ','
                << run.round_stats[i].blacklisted_count << '\n';
        }
    }
}

void write_events(std::ostream& out, std::span<const RunResult> runs)
{
    out << events_header << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& e : runs[r].events) {
            out << r << ',';
            write_event_row(out, e);
        }
    }
}

void write_raw_runs(std::ostream& out, std::span<const RunResult> runs, std::uint64_t base_seed)
{
    out << raw_runs_header << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& c = runs[r].counts;
        const auto& m = runs[r].report;
        out << r << ',' << base_seed + r << ',' << c.tp << ',' << c.tn << ',' << c.fp << ',' << c.fn << ','
            << c.attackers_inserted << ',' << c.total_interactions << ',' << cell(m.detection_rate) << ','
            << cell(m.accuracy) << ',' << cell(m.accuracy_pct) << ',' << cell(m.fpr) << ',' << cell(m.fnr) << ','
            << cell(m.precision) << ',' << cell(m.recall) << ',' << cell(m.f1) << ','
            << format_double(m.clusters_total_mean) << ',' << format_double(m.clusters_attacker_free_mean) << ','
            << format_double(m.fn_count_unnormalized) << '\n';
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

int run_sweep(const SweepOptions& opts, std::ostream& err)
{
    std::vector<RunResult> runs;
    try {
        runs = run_seeds(opts);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const TraceError& e) {
        err << e.what() << '\n';
        return exit_trace_error;
    }

    std::vector<MetricsReport> reports;
    reports.reserve(runs.size());
    for (const auto& r : runs) reports.push_back(r.report);
    const auto agg = aggregate_runs(reports);

    try {
        std::error_code ec;
        std::filesystem::create_directories(opts.out_dir / "raw", ec);
        if (ec) throw IoError("cannot create " + (opts.out_dir / "raw").string() + ": " + ec.message());

        auto render = [](auto&& fn) {
            std::ostringstream s;
            fn(s);
            return std::move(s).str();
        };
        ScenarioConfig resolved = opts.scenario;
        resolved.seed = opts.base_seed;
        write_file_atomic(opts.out_dir / "summary.csv", render([&](std::ostream& s) { write_summary(s, resolved, agg); }));
        write_file_atomic(opts.out_dir / "timeseries.csv", render([&](std::ostream& s) { write_timeseries(s, runs); }));
        write_file_atomic(opts.out_dir / "events.csv", render([&](std::ostream& s) { write_events(s, runs); }));
        write_file_atomic(opts.out_dir / "raw" / "runs.csv",
                          render([&](std::ostream& s) { write_raw_runs(s, runs, opts.base_seed); }));
        write_file_atomic(opts.out_dir / "raw" / "config.txt", render([&](std::ostream& s) { write_config(resolved, s); }));
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io_error;
    }
    return exit_ok;
}

}  // namespace confinit
