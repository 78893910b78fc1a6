#include "confinit/sensing.hpp"

#include "confinit/rng.hpp"
#include "confinit/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string_view>

namespace confinit {

void FieldConfig::validate() const
{
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (!std::isfinite(base_value) || !std::isfinite(drift_per_round) || !std::isfinite(spatial_gradient)) {
        throw std::invalid_argument("field parameters must be finite");
    }
}

Reading synth_reading(Point position, NodeId node, Round round, const FieldConfig& cfg, std::uint64_t seed)
{
    Reading value = cfg.base_value + cfg.drift_per_round * round + cfg.spatial_gradient * (position.x + position.y);
    if (cfg.noise_sigma > 0.0) {
        CounterRng rng(seed, StreamPurpose::sensing_noise, to_index(node), round);
        value += cfg.noise_sigma * rng.normal();
    }
    return value;
}

TraceTable::TraceTable(std::uint32_t n_rounds, std::uint32_t n_nodes, std::vector<Reading> values)
    : n_rounds_(n_rounds), n_nodes_(n_nodes), values_(std::move(values))
{
    if (values_.size() != std::size_t{n_rounds_} * n_nodes_) throw TraceError("trace format error: size mismatch");
}

Reading TraceTable::at(Round round, NodeId node) const
{
    if (round >= n_rounds_ || to_index(node) >= n_nodes_) throw std::out_of_range("trace index out of range");
    return values_[std::size_t{round} * n_nodes_ + to_index(node)];
}

namespace {

[[noreturn]] void format_error(std::size_t line, const std::string& what)
{
    throw TraceError("trace format error at line " + std::to_string(line) + ": " + what);
}

template <typename T>
std::optional<T> parse_number(std::string_view text)
{
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

}  // namespace

TraceTable parse_trace(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) format_error(1, "missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "round,node_id,value") format_error(line_no, "expected header 'round,node_id,value'");

    std::map<std::pair<std::uint32_t, std::uint32_t>, Reading> cells;
    std::uint32_t max_round = 0;
    std::uint32_t max_node = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) format_error(line_no, "blank line");
        const auto fields = split(line, ',');
        if (fields.size() != 3) format_error(line_no, "expected 3 fields");
        const auto round = parse_number<std::uint32_t>(fields[0]);
        const auto node = parse_number<std::uint32_t>(fields[1]);
        const auto value = parse_number<double>(fields[2]);
        if (!round || !node) format_error(line_no, "round and node_id must be non-negative integers");
        if (!value || !std::isfinite(*value)) format_error(line_no, "value must be a finite decimal");
        if (!cells.emplace(std::pair{*round, *node}, *value).second) {
            format_error(line_no, "duplicate pair (" + std::string(fields[0]) + ", node " + std::string(fields[1]) + ")");
        }
        max_round = std::max(max_round, *round);
        max_node = std::max(max_node, *node);
    }
    if (cells.empty()) format_error(line_no, "no data rows");

    const std::uint32_t n_rounds = max_round + 1;
    const std::uint32_t n_nodes = max_node + 1;
    std::vector<Reading> values;
    values.reserve(std::size_t{n_rounds} * n_nodes);
    for (std::uint32_t r = 0; r < n_rounds; ++r) {
        for (std::uint32_t n = 0; n < n_nodes; ++n) {
            auto it = cells.find({r, n});
            if (it == cells.end()) {
                format_error(line_no, "missing pair (" + std::to_string(r) + ", node " + std::to_string(n) + ")");
            }
            values.push_back(it->second);
        }
    }
    return TraceTable(n_rounds, n_nodes, std::move(values));
}

TraceTable load_trace(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw TraceError("trace not found: " + path.string());
    return parse_trace(in);
}

void write_trace(const TraceTable& table, std::ostream& out)
{
    out << "round,node_id,value\n";
    for (std::uint32_t r = 0; r < table.n_rounds(); ++r) {
        for (std::uint32_t n = 0; n < table.n_nodes(); ++n) {
            out << r << ',' << n << ',' << format_double(table.at(r, node_id(n))) << '\n';
        }
    }
}

}  // namespace confinit
