#include "confinit/config.hpp"

#include "confinit/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace confinit {

namespace {

template <typename T>
bool parse_value(std::string_view text, T& out)
{
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_value(std::string_view text, bool& out)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        out = false;
        return true;
    }
    return false;
}

using Setter = std::function<bool(ScenarioConfig&, std::string_view)>;

template <typename T, typename Pick>
Setter number(Pick pick)
{
    return [pick](ScenarioConfig& cfg, std::string_view v) {
        T value{};
        if (!parse_value(v, value)) return false;
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(value)) return false;
        }
        pick(cfg) = value;
        return true;
    };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"n_nodes", number<std::uint32_t>([](ScenarioConfig& c) -> auto& { return c.n_nodes; })},
        {"area_width_m", number<double>([](ScenarioConfig& c) -> auto& { return c.area_width_m; })},
        {"area_height_m", number<double>([](ScenarioConfig& c) -> auto& { return c.area_height_m; })},
        {"tx_radius_m", number<double>([](ScenarioConfig& c) -> auto& { return c.tx_radius_m; })},
        {"n_rounds", number<std::uint32_t>([](ScenarioConfig& c) -> auto& { return c.n_rounds; })},
        {"attacker_fraction", number<double>([](ScenarioConfig& c) -> auto& { return c.attacker_fraction; })},
        {"cthresh", number<double>([](ScenarioConfig& c) -> auto& { return c.cluster.cthresh; })},
        {"neighbor_ttl_rounds",
         number<std::uint32_t>([](ScenarioConfig& c) -> auto& { return c.cluster.neighbor_ttl_rounds; })},
        {"consensus_threshold",
         number<double>([](ScenarioConfig& c) -> auto& { return c.detection.consensus_threshold; })},
        {"detection_enabled", number<bool>([](ScenarioConfig& c) -> auto& { return c.detection.detection_enabled; })},
        {"attack_type",
         [](ScenarioConfig& c, std::string_view v) {
             auto t = parse_attack_type(v);
             if (t) c.attack.type = *t;
             return t.has_value();
         }},
        {"fdi_offset_min", number<double>([](ScenarioConfig& c) -> auto& { return c.attack.fdi_offset_min; })},
        {"fdi_offset_max", number<double>([](ScenarioConfig& c) -> auto& { return c.attack.fdi_offset_max; })},
        {"churn_honest_rounds",
         number<std::uint32_t>([](ScenarioConfig& c) -> auto& { return c.attack.churn_honest_rounds; })},
        {"churn_false_rounds",
         number<std::uint32_t>([](ScenarioConfig& c) -> auto& { return c.attack.churn_false_rounds; })},
        {"churn_magnitude",
         [](ScenarioConfig& c, std::string_view v) {
             auto t = parse_attack_type(v);
             if (!t || *t == AttackType::churn) return false;
             c.attack.churn_magnitude = *t;
             return true;
         }},
        {"sensitive_margin", number<double>([](ScenarioConfig& c) -> auto& { return c.attack.sensitive_margin; })},
        {"forge_sign",
         [](ScenarioConfig& c, std::string_view v) {
             auto s = parse_forge_sign(v);
             if (s) c.attack.forge_sign = *s;
             return s.has_value();
         }},
        {"base_value", number<double>([](ScenarioConfig& c) -> auto& { return c.field.base_value; })},
        {"drift_per_round", number<double>([](ScenarioConfig& c) -> auto& { return c.field.drift_per_round; })},
        {"spatial_gradient", number<double>([](ScenarioConfig& c) -> auto& { return c.field.spatial_gradient; })},
        {"noise_sigma", number<double>([](ScenarioConfig& c) -> auto& { return c.field.noise_sigma; })},
        {"trace_path",
         [](ScenarioConfig& c, std::string_view v) {
             if (v.empty()) return false;
             c.trace_path = std::filesystem::path(std::string(v));
             return true;
         }},
        {"seed", number<std::uint64_t>([](ScenarioConfig& c) -> auto& { return c.seed; })},
        {"crash_fraction", number<double>([](ScenarioConfig& c) -> auto& { return c.crash_fraction; })},
        {"crash_round", number<std::uint32_t>([](ScenarioConfig& c) -> auto& { return c.crash_round; })},
        {"scenario_id",
         [](ScenarioConfig& c, std::string_view v) {
             if (v.empty() || v.find(',') != std::string_view::npos) return false;
             c.scenario_id = std::string(v);
             return true;
         }},
    };
    return table;
}

void apply_overrides(ScenarioConfig& cfg, const ConfigOverrides& o)
{
    if (o.nodes) cfg.n_nodes = *o.nodes;
    if (o.attackers_pct) cfg.attacker_fraction = *o.attackers_pct / 100.0;
    if (o.attack) cfg.attack.type = *o.attack;
    if (o.seed) cfg.seed = *o.seed;
    if (o.detection_enabled) cfg.detection.detection_enabled = *o.detection_enabled;
    if (o.trace_path) cfg.trace_path = *o.trace_path;
}

}  // namespace

ScenarioConfig parse_config(std::istream& in, const ConfigOverrides& overrides)
{
    ScenarioConfig cfg;
    std::map<std::string, std::size_t, std::less<>> key_lines;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        if (!it->second(cfg, value)) {
            throw ConfigError("line " + std::to_string(line_no) + ": invalid value '" + std::string(value) +
                              "' for key '" + std::string(key) + "'");
        }
        key_lines[std::string(key)] = line_no;
    }
    apply_overrides(cfg, overrides);

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // Messages start with the offending key; point at its line if it came from the file.
        const std::string_view msg = e.what();
        const auto key = msg.substr(0, msg.find(' '));
        if (auto it = key_lines.find(key); it != key_lines.end()) {
            throw ConfigError("line " + std::to_string(it->second) + ": " + std::string(msg));
        }
        throw;
    }
    return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path, const ConfigOverrides& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    return parse_config(in, overrides);
}

void write_config(const ScenarioConfig& cfg, std::ostream& out)
{
    out << "n_nodes = " << cfg.n_nodes << '\n'
        << "area_width_m = " << format_double(cfg.area_width_m) << '\n'
        << "area_height_m = " << format_double(cfg.area_height_m) << '\n'
        << "tx_radius_m = " << format_double(cfg.tx_radius_m) << '\n'
        << "n_rounds = " << cfg.n_rounds << '\n'
        << "attacker_fraction = " << format_double(cfg.attacker_fraction) << '\n'
        << "cthresh = " << format_double(cfg.cluster.cthresh) << '\n'
        << "neighbor_ttl_rounds = " << cfg.cluster.neighbor_ttl_rounds << '\n'
        << "consensus_threshold = " << format_double(cfg.detection.consensus_threshold) << '\n'
        << "detection_enabled = " << (cfg.detection.detection_enabled ? "true" : "false") << '\n'
        << "attack_type = " << to_string(cfg.attack.type) << '\n'
        << "fdi_offset_min = " << format_double(cfg.attack.fdi_offset_min) << '\n'
        << "fdi_offset_max = " << format_double(cfg.attack.fdi_offset_max) << '\n'
        << "churn_honest_rounds = " << cfg.attack.churn_honest_rounds << '\n'
        << "churn_false_rounds = " << cfg.attack.churn_false_rounds << '\n'
        << "churn_magnitude = " << to_string(cfg.attack.churn_magnitude) << '\n'
        << "sensitive_margin = " << format_double(cfg.attack.sensitive_margin) << '\n'
        << "forge_sign = " << to_string(cfg.attack.forge_sign) << '\n'
        << "base_value = " << format_double(cfg.field.base_value) << '\n'
        << "drift_per_round = " << format_double(cfg.field.drift_per_round) << '\n'
        << "spatial_gradient = " << format_double(cfg.field.spatial_gradient) << '\n'
        << "noise_sigma = " << format_double(cfg.field.noise_sigma) << '\n';
    if (cfg.trace_path) out << "trace_path = " << cfg.trace_path->string() << '\n';
    out << "seed = " << cfg.seed << '\n'
        << "crash_fraction = " << format_double(cfg.crash_fraction) << '\n'
        << "crash_round = " << cfg.crash_round << '\n';
    if (!cfg.scenario_id.empty()) out << "scenario_id = " << cfg.scenario_id << '\n';
}

std::string scenario_id(const ScenarioConfig& cfg)
{
    if (!cfg.scenario_id.empty()) return cfg.scenario_id;
    std::ostringstream id;
    id << 'n' << cfg.n_nodes << "_a" << format_double(std::round(cfg.attacker_fraction * 1e4) / 1e2) << '_'
       << to_string(cfg.attack.type) << (cfg.detection.detection_enabled ? "_det" : "_nodet");
    return id.str();
}

}  // namespace confinit
