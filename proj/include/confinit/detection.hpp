// Fault management: consensus standard deviation, the two-step collaborative
// filter, suspect/attacker transitions, alerts and the blacklist.

#pragma once

#include "confinit/domain.hpp"
#include "confinit/node_state.hpp"

#include <optional>
#include <span>
#include <vector>

namespace confinit {

struct DetectionConfig {
    double consensus_threshold = 5.0;
    bool detection_enabled = true;

    void validate() const;
};

/// Readings the detector trusts: its own plus its similar neighbors'.
struct ConsensusRegion {
    std::vector<Reading> values;

    double mean() const;
    std::size_t count() const { return values.size(); }
};

/// Population standard deviation (divides by N). Throws
/// std::invalid_argument("empty consensus region") on an empty input.
double region_sd(std::span<const Reading> values);

enum class SuspectClass : std::uint8_t { honest, attacker, region_invalid };

struct Classification {
    SuspectClass verdict = SuspectClass::region_invalid;
    double region_sd = 0.0;
    std::optional<double> combined_sd;  // absent when the region itself failed
};

/// Step 1: the region must itself be in consensus (SD <= threshold).
/// Step 2: the region plus the suspect's reading; SD above the threshold
/// marks an attacker, SD equal to it is still honest.
Classification classify_suspect(const ConsensusRegion& region, Reading suspect_reading,
                                const DetectionConfig& cfg);

/// Own reading followed by the latest individual readings of similar
/// neighbors, in ascending id order. Suspects, blacklisted ids and `exclude`
/// are left out.
ConsensusRegion consensus_region(const NodeState& state, Reading own_reading, NodeId exclude);

enum class SuspectAction : std::uint8_t {
    none,
    suspect_added,
    suspect_cleared,
    attacker_detected,
    pending,  // region not in consensus; suspect kept as-is
};

struct SuspectOutcome {
    SuspectAction action = SuspectAction::none;
    std::optional<Classification> classification;
    std::optional<AlertMessage> alert;
};

/// Watchdog step for one received DM, run after handle_data_message.
SuspectOutcome process_suspect(NodeState& state, Reading own_reading, NodeId sender, Reading sender_reading,
                               Similarity verdict, const DetectionConfig& cfg, Round round);

/// Throws std::logic_error if detector == attacker.
AlertMessage emit_alert(NodeId detector, NodeId attacker, Reading reading);

struct AlertHandling {
    bool newly_blacklisted = false;
    bool forward = false;
};

/// Blacklists the AM's attacker and purges it from the table and suspect
/// list. Leaders forward entries that are new to them; duplicates are no-ops.
AlertHandling handle_alert(NodeState& state, const AlertMessage& am, bool is_leader, Round round);

bool is_blacklisted(const NodeState& state, NodeId id);

}  // namespace confinit
