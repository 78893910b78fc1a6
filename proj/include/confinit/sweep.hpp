// Seed sweeps and the CSV reports they produce.

#pragma once

#include "confinit/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace confinit {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 1,
    exit_trace_error = 2,
    exit_io_error = 3,
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepOptions {
    ScenarioConfig scenario;  // scenario.seed is ignored; see base_seed
    std::uint32_t runs = 35;
    std::uint64_t base_seed = 1;
    std::filesystem::path out_dir = "out";
    unsigned jobs = 1;  // 0 = hardware concurrency
};

/// Runs seeds base_seed .. base_seed + runs - 1, possibly in parallel.
/// Results are ordered by seed. Propagates ConfigError / TraceError.
std::vector<RunResult> run_seeds(const SweepOptions& opts);

extern const char* const summary_header;
extern const char* const timeseries_header;
extern const char* const events_header;
extern const char* const raw_runs_header;

void write_summary(std::ostream& out, const ScenarioConfig& cfg, const AggregateReport& agg);
void write_timeseries(std::ostream& out, std::span<const RunResult> runs);
void write_events(std::ostream& out, std::span<const RunResult> runs);
void write_raw_runs(std::ostream& out, std::span<const RunResult> runs, std::uint64_t base_seed);

/// Writes `contents` to a sibling temp file and renames it over `path`.
/// Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Full sweep: runs, then summary.csv, timeseries.csv, events.csv,
/// raw/runs.csv and raw/config.txt under out_dir. Returns an ExitCode;
/// `err` receives a one-line diagnostic on failure.
int run_sweep(const SweepOptions& opts, std::ostream& err);

}  // namespace confinit
