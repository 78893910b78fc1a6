// Clustering management: similarity aggregation, DM send/receive handling,
// neighbor-table maintenance, leader election and cluster extraction.

#pragma once

#include "confinit/domain.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace confinit {

struct NeighborRecord {
    NodeId neighbor{};
    Reading individual_reading = 0.0;
    Reading aggregate_reading = 0.0;
    std::uint32_t neighbor_count = 0;
    Round last_seen_round = 0;

    bool operator==(const NeighborRecord&) const = default;
};

struct ClusterConfig {
    double cthresh = 3.0;
    std::uint32_t neighbor_ttl_rounds = 3;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Per-node view of heard neighbors (N_viz) and the subset currently similar.
class NeighborTable {
public:
    const NeighborRecord* find(NodeId id) const;
    bool contains(NodeId id) const { return records_.contains(id); }
    bool is_similar(NodeId id) const { return similar_.contains(id); }

    void upsert(const NeighborRecord& record);
    void mark_similar(NodeId id, bool similar);
    /// Drops the record and its similar-set membership. Returns true if present.
    bool erase(NodeId id);

    const std::map<NodeId, NeighborRecord>& records() const { return records_; }
    const std::set<NodeId>& similar_set() const { return similar_; }
    std::vector<NeighborRecord> similar_records() const;

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    bool operator==(const NeighborTable&) const = default;

private:
    std::map<NodeId, NeighborRecord> records_;
    std::set<NodeId> similar_;
};

/// (X + sum aR*nR) / (1 + sum nR): the weighted reading inside the
/// similarity test. With no neighbors this is the node's own reading.
Reading aggregate_reading(Reading own, std::span<const NeighborRecord> neighbors);

/// Aggregate over the table's similar set only.
Reading aggregate_over_similar(Reading own, const NeighborTable& table);

/// Both comparisons are strict: a deviation equal to cthresh is dissimilar.
bool is_similar(Reading candidate_individual, Reading candidate_aggregate, Reading own_individual,
                Reading own_aggregate, const ClusterConfig& cfg);

/// DM for the node's next broadcast. The aggregate is always computed from
/// `own_reading`; `broadcast_reading` replaces the individual field when the
/// node is forging.
DataMessage build_data_message(NodeId self, Reading own_reading, const NeighborTable& table,
                               std::optional<Reading> broadcast_reading = std::nullopt);

enum class Similarity : std::uint8_t { similar, dissimilar };

/// Stores the sender's record and updates similar-set membership. The
/// message must already have passed validate_data_message.
Similarity handle_data_message(NeighborTable& table, const DataMessage& msg, Reading own_individual,
                               Reading own_aggregate, const ClusterConfig& cfg, Round round);

/// Every node at the maximum count is a leader. Result is sorted by id.
std::vector<NodeId> elect_leaders(std::span<const std::pair<NodeId, std::uint32_t>> counts);

/// Removes records not heard for more than neighbor_ttl_rounds. Returns the
/// evicted ids in ascending order.
std::vector<NodeId> prune_stale_neighbors(NeighborTable& table, Round round, const ClusterConfig& cfg);

struct ClusterSnapshot {
    Round round = 0;
    std::vector<std::vector<NodeId>> clusters;  // each sorted, ordered by smallest member
    std::vector<std::vector<NodeId>> leaders;   // parallel to clusters

    /// Index of the cluster containing `id`, if any.
    std::optional<std::size_t> cluster_of(NodeId id) const;
    bool is_leader(NodeId id) const;
    std::vector<NodeId> all_leaders() const;

    bool operator==(const ClusterSnapshot&) const = default;
};

/// Connected components (size >= 2) of the mutual-similarity graph over the
/// nodes present in `similar_sets`. Absent nodes (e.g. blacklisted) are
/// excluded even if others still list them.
ClusterSnapshot extract_clusters(const std::map<NodeId, std::set<NodeId>>& similar_sets, Round round);

}  // namespace confinit
