// Flat `key = value` scenario files and command-line overrides.

#pragma once

#include "confinit/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace confinit {

/// Values given on the command line; each one wins over the file.
struct ConfigOverrides {
    std::optional<std::uint32_t> nodes;
    std::optional<double> attackers_pct;  // percent, e.g. 10 for 10%
    std::optional<AttackType> attack;
    std::optional<std::uint64_t> seed;
    std::optional<bool> detection_enabled;
    std::optional<std::filesystem::path> trace_path;
};

/// Parses the key = value format: one pair per line, `#` starts a comment,
/// blank lines ignored. Omitted keys keep their defaults. Throws ConfigError
/// mentioning the key and line on unknown keys or bad values.
ScenarioConfig parse_config(std::istream& in, const ConfigOverrides& overrides = {});

/// Same as above for a file; an unreadable file is a ConfigError.
ScenarioConfig parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Writes every key in the format parse_config reads back.
void write_config(const ScenarioConfig& cfg, std::ostream& out);

/// e.g. "n100_a10_fdi_det"; the scenario_id key replaces it when set.
std::string scenario_id(const ScenarioConfig& cfg);

}  // namespace confinit
