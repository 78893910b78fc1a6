// Ground-truth readings: a synthetic smooth field, or an external trace.

#pragma once

#include "confinit/domain.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace confinit {

struct FieldConfig {
    double base_value = 16.0;
    double drift_per_round = 0.0;
    double spatial_gradient = 0.001;  // per meter, applied to x + y
    double noise_sigma = 0.3;

    void validate() const;
};

/// base + drift*round + gradient*(x+y) + N(0, sigma). The noise term is keyed
/// by (seed, node, round).
Reading synth_reading(Point position, NodeId node, Round round, const FieldConfig& cfg, std::uint64_t seed);

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense (round, node) -> reading table, round-major.
class TraceTable {
public:
    TraceTable() = default;
    TraceTable(std::uint32_t n_rounds, std::uint32_t n_nodes, std::vector<Reading> values);

    std::uint32_t n_rounds() const { return n_rounds_; }
    std::uint32_t n_nodes() const { return n_nodes_; }
    std::size_t size() const { return values_.size(); }
    Reading at(Round round, NodeId node) const;

    bool operator==(const TraceTable&) const = default;

private:
    std::uint32_t n_rounds_ = 0;
    std::uint32_t n_nodes_ = 0;
    std::vector<Reading> values_;
};

/// Parses `round,node_id,value` CSV. Throws TraceError: "trace not found" for
/// a missing file, "trace format error" (with line number) otherwise.
TraceTable load_trace(const std::filesystem::path& path);
TraceTable parse_trace(std::istream& in);

/// Writes the table in the same format, rows ordered by (round, node_id),
/// values in shortest round-trip form.
void write_trace(const TraceTable& table, std::ostream& out);

}  // namespace confinit
