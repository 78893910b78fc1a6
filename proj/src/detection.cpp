#include "confinit/detection.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace confinit {

void DetectionConfig::validate() const
{
    if (!(consensus_threshold > 0.0) || !std::isfinite(consensus_threshold)) {
        throw std::invalid_argument("consensus_threshold must be > 0");
    }
}

double ConsensusRegion::mean() const
{
    if (values.empty()) throw std::invalid_argument("empty consensus region");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double region_sd(std::span<const Reading> values)
{
    if (values.empty()) throw std::invalid_argument("empty consensus region");
    // Deviations are taken about the first value so a constant region is
    // exactly zero.
    const double n = static_cast<double>(values.size());
    const Reading pivot = values.front();
    double sum = 0.0;
    for (Reading x : values) sum += x - pivot;
    const double mean = sum / n;
    double ss = 0.0;
    for (Reading x : values) ss += (x - pivot - mean) * (x - pivot - mean);
    return std::sqrt(ss / n);
}

Classification classify_suspect(const ConsensusRegion& region, Reading suspect_reading,
                                const DetectionConfig& cfg)
{
    Classification out;
    out.region_sd = region_sd(region.values);
    if (out.region_sd > cfg.consensus_threshold) {
        out.verdict = SuspectClass::region_invalid;
        return out;
    }
    std::vector<Reading> combined = region.values;
    combined.push_back(suspect_reading);
    out.combined_sd = region_sd(combined);
    out.verdict = *out.combined_sd > cfg.consensus_threshold ? SuspectClass::attacker : SuspectClass::honest;
    return out;
}

ConsensusRegion consensus_region(const NodeState& state, Reading own_reading, NodeId exclude)
{
    ConsensusRegion region;
    region.values.reserve(state.table.similar_set().size() + 1);
    region.values.push_back(own_reading);
    for (NodeId id : state.table.similar_set()) {
        if (id == exclude || state.suspects.contains(id) || state.blacklist.contains(id)) continue;
        region.values.push_back(state.table.find(id)->individual_reading);
    }
    return region;
}

SuspectOutcome process_suspect(NodeState& state, Reading own_reading, NodeId sender, Reading sender_reading,
                               Similarity verdict, const DetectionConfig& cfg, Round round)
{
    SuspectOutcome out;
    if (!cfg.detection_enabled || state.blacklist.contains(sender)) return out;

    auto suspect = state.suspects.find(sender);
    if (suspect == state.suspects.end()) {
        if (verdict == Similarity::dissimilar) {
            state.suspects.emplace(sender, SuspectEntry{round, sender_reading});
            out.action = SuspectAction::suspect_added;
        }
        return out;
    }

    suspect->second.last_reading = sender_reading;
    out.classification = classify_suspect(consensus_region(state, own_reading, sender), sender_reading, cfg);
    switch (out.classification->verdict) {
    case SuspectClass::region_invalid:
        out.action = SuspectAction::pending;
        break;
    case SuspectClass::honest:
        state.suspects.erase(suspect);
        out.action = SuspectAction::suspect_cleared;
        break;
    case SuspectClass::attacker:
        state.suspects.erase(suspect);
        state.table.erase(sender);
        state.blacklist.emplace(sender, BlacklistEntry{round, state.id, sender_reading});
        out.action = SuspectAction::attacker_detected;
        out.alert = emit_alert(state.id, sender, sender_reading);
        break;
    }
    return out;
}

AlertMessage emit_alert(NodeId detector, NodeId attacker, Reading reading)
{
    if (detector == attacker) throw std::logic_error("a node cannot raise an alert against itself");
    AlertMessage am;
    am.detector = detector;
    am.attacker = attacker;
    am.attacker_reading = reading;
    return am;
}

AlertHandling handle_alert(NodeState& state, const AlertMessage& am, bool is_leader, Round round)
{
    AlertHandling out;
    const NodeId attacker = *am.attacker;
    if (attacker == state.id || state.blacklist.contains(attacker)) return out;
    state.blacklist.emplace(attacker, BlacklistEntry{round, *am.detector, *am.attacker_reading});
    state.suspects.erase(attacker);
    state.table.erase(attacker);
    out.newly_blacklisted = true;
    out.forward = is_leader;
    return out;
}

bool is_blacklisted(const NodeState& state, NodeId id) { return state.blacklist.contains(id); }

}  // namespace confinit
