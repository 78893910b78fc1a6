#include "confinit/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace confinit {

void ClusterConfig::validate() const
{
    if (!(cthresh > 0.0) || !std::isfinite(cthresh)) throw std::invalid_argument("cthresh must be > 0");
    if (neighbor_ttl_rounds < 1) throw std::invalid_argument("neighbor_ttl_rounds must be >= 1");
}

const NeighborRecord* NeighborTable::find(NodeId id) const
{
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

void NeighborTable::upsert(const NeighborRecord& record) { records_[record.neighbor] = record; }

void NeighborTable::mark_similar(NodeId id, bool similar)
{
    if (similar && records_.contains(id)) {
        similar_.insert(id);
    } else {
        similar_.erase(id);
    }
}

bool NeighborTable::erase(NodeId id)
{
    similar_.erase(id);
    return records_.erase(id) > 0;
}

std::vector<NeighborRecord> NeighborTable::similar_records() const
{
    std::vector<NeighborRecord> out;
    out.reserve(similar_.size());
    for (NodeId id : similar_) out.push_back(records_.at(id));
    return out;
}

Reading aggregate_reading(Reading own, std::span<const NeighborRecord> neighbors)
{
    double weighted = own;
    double weight = 1.0;
    for (const auto& n : neighbors) {
        weighted += n.aggregate_reading * n.neighbor_count;
        weight += n.neighbor_count;
    }
    return weighted / weight;
}

Reading aggregate_over_similar(Reading own, const NeighborTable& table)
{
    double weighted = own;
    double weight = 1.0;
    for (NodeId id : table.similar_set()) {
        const auto& n = *table.find(id);
        weighted += n.aggregate_reading * n.neighbor_count;
        weight += n.neighbor_count;
    }
    return weighted / weight;
}

bool is_similar(Reading candidate_individual, Reading candidate_aggregate, Reading own_individual,
                Reading own_aggregate, const ClusterConfig& cfg)
{
    return std::abs(candidate_individual - own_aggregate) < cfg.cthresh &&
           std::abs(own_individual - candidate_aggregate) < cfg.cthresh;
}

DataMessage build_data_message(NodeId self, Reading own_reading, const NeighborTable& table,
                               std::optional<Reading> broadcast_reading)
{
    DataMessage dm;
    dm.sender = self;
    dm.individual_reading = broadcast_reading.value_or(own_reading);
    dm.aggregate_reading = aggregate_over_similar(own_reading, table);
    dm.neighbor_count = static_cast<std::uint32_t>(table.similar_set().size());
    return dm;
}

Similarity handle_data_message(NeighborTable& table, const DataMessage& msg, Reading own_individual,
                               Reading own_aggregate, const ClusterConfig& cfg, Round round)
{
    NeighborRecord rec{*msg.sender, *msg.individual_reading, *msg.aggregate_reading, *msg.neighbor_count,
                       round};
    table.upsert(rec);
    const bool similar =
        is_similar(rec.individual_reading, rec.aggregate_reading, own_individual, own_aggregate, cfg);
    table.mark_similar(rec.neighbor, similar);
    return similar ? Similarity::similar : Similarity::dissimilar;
}

std::vector<NodeId> elect_leaders(std::span<const std::pair<NodeId, std::uint32_t>> counts)
{
    std::vector<NodeId> leaders;
    if (counts.empty()) return leaders;
    std::uint32_t best = 0;
    for (const auto& [id, c] : counts) best = std::max(best, c);
    for (const auto& [id, c] : counts) {
        if (c == best) leaders.push_back(id);
    }
    std::sort(leaders.begin(), leaders.end());
    return leaders;
}

std::vector<NodeId> prune_stale_neighbors(NeighborTable& table, Round round, const ClusterConfig& cfg)
{
    std::vector<NodeId> stale;
    for (const auto& [id, rec] : table.records()) {
        if (round > rec.last_seen_round && round - rec.last_seen_round > cfg.neighbor_ttl_rounds) {
            stale.push_back(id);
        }
    }
    for (NodeId id : stale) table.erase(id);
    return stale;
}

std::optional<std::size_t> ClusterSnapshot::cluster_of(NodeId id) const
{
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (std::binary_search(clusters[i].begin(), clusters[i].end(), id)) return i;
    }
    return std::nullopt;
}

bool ClusterSnapshot::is_leader(NodeId id) const
{
    for (const auto& group : leaders) {
        if (std::binary_search(group.begin(), group.end(), id)) return true;
    }
    return false;
}

std::vector<NodeId> ClusterSnapshot::all_leaders() const
{
    std::vector<NodeId> out;
    for (const auto& group : leaders) out.insert(out.end(), group.begin(), group.end());
    std::sort(out.begin(), out.end());
    return out;
}

ClusterSnapshot extract_clusters(const std::map<NodeId, std::set<NodeId>>& similar_sets, Round round)
{
    auto mutual = [&](NodeId u, NodeId v) {
        auto it = similar_sets.find(v);
        return it != similar_sets.end() && it->second.contains(u);
    };

    ClusterSnapshot snap;
    snap.round = round;
    std::set<NodeId> visited;
    for (const auto& [start, unused] : similar_sets) {
        if (visited.contains(start)) continue;
        std::vector<NodeId> component{start};
        visited.insert(start);
        for (std::size_t i = 0; i < component.size(); ++i) {
            NodeId u = component[i];
            for (NodeId v : similar_sets.at(u)) {
                if (visited.contains(v) || !mutual(u, v)) continue;
                visited.insert(v);
                component.push_back(v);
            }
        }
        if (component.size() < 2) continue;
        std::sort(component.begin(), component.end());

        std::vector<std::pair<NodeId, std::uint32_t>> counts;
        counts.reserve(component.size());
        for (NodeId u : component) {
            std::uint32_t c = 0;
            for (NodeId v : similar_sets.at(u)) {
                if (std::binary_search(component.begin(), component.end(), v)) ++c;
            }
            counts.emplace_back(u, c);
        }
        snap.leaders.push_back(elect_leaders(counts));
        snap.clusters.push_back(std::move(component));
    }
    return snap;
}

}  // namespace confinit
