#pragma once

#include "confinit/clustering.hpp"
#include "confinit/domain.hpp"

#include <map>

namespace confinit {

struct SuspectEntry {
    Round first_flag_round = 0;
    Reading last_reading = 0.0;

    bool operator==(const SuspectEntry&) const = default;
};

struct BlacklistEntry {
    Round detected_round = 0;
    NodeId detector{};
    Reading reading = 0.0;

    bool operator==(const BlacklistEntry&) const = default;
};

using SuspectList = std::map<NodeId, SuspectEntry>;
using Blacklist = std::map<NodeId, BlacklistEntry>;

/// Everything one node knows: its neighbor table plus the watchdog lists.
struct NodeState {
    NodeId id{};
    NeighborTable table;
    SuspectList suspects;
    Blacklist blacklist;
    NodeRole role = NodeRole::isolated;

    bool operator==(const NodeState&) const = default;
};

}  // namespace confinit
