// Deterministic round-based world: placement, unit-disk adjacency, per-round
// DM exchange, watchdog processing, alert delivery, election, snapshots.

#pragma once

#include "confinit/attacks.hpp"
#include "confinit/clustering.hpp"
#include "confinit/detection.hpp"
#include "confinit/metrics.hpp"
#include "confinit/node_state.hpp"
#include "confinit/sensing.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confinit {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
    std::uint32_t n_nodes = 100;
    double area_width_m = 200.0;
    double area_height_m = 200.0;
    double tx_radius_m = 100.0;
    std::uint32_t n_rounds = 600;
    double attacker_fraction = 0.10;
    ClusterConfig cluster;
    DetectionConfig detection;
    AttackConfig attack;
    FieldConfig field;
    std::optional<std::filesystem::path> trace_path;
    std::uint64_t seed = 1;
    std::string scenario_id;  // empty: derived from the scenario parameters
    // Honest nodes that silently stop emitting from crash_round on.
    double crash_fraction = 0.0;
    Round crash_round = 0;

    // Fixed layouts for hand-built topologies; override the random draws.
    std::optional<std::vector<Point>> positions;
    std::optional<std::vector<NodeId>> attackers;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

enum class EventType : std::uint8_t {
    dm_sent,
    dm_discarded,
    suspect_added,
    suspect_cleared,
    attacker_detected,
    alert_forwarded,
    node_excluded,
};

std::string_view to_string(EventType type);

struct Event {
    Round round = 0;
    EventType type = EventType::dm_sent;
    NodeId node{};
    std::optional<NodeId> subject;
    std::optional<double> value;

    bool operator==(const Event&) const = default;
};

/// `round,event,node,subject,value`; absent fields are left empty.
void write_event_row(std::ostream& out, const Event& e);

struct RoundStats {
    std::size_t dms_emitted = 0;
    std::size_t dms_delivered = 0;
    std::size_t blacklisted_count = 0;  // nodes blacklisted by at least one node
};

using Adjacency = std::vector<std::vector<NodeId>>;

/// n_nodes points i.i.d. uniform over the area, deterministic in the seed.
std::vector<Point> place_nodes(const ScenarioConfig& cfg);

/// Edge iff Euclidean distance <= radius. Neighbor lists ascending.
Adjacency compute_adjacency(std::span<const Point> positions, double tx_radius_m);

struct WorldState {
    std::vector<Point> positions;
    Adjacency adjacency;
    std::vector<NodeState> nodes;
    GroundTruth ground_truth;
    Round round = 0;  // next round to execute

    struct PendingAlert {
        AlertMessage alert;
        Round delivery_round = 0;
    };
    std::vector<PendingAlert> pending_alerts;

    std::vector<bool> crashed;
    std::vector<bool> excluded;                        // flooded on the leader overlay
    std::vector<std::optional<Round>> first_detected;  // first blacklisting anywhere
    std::vector<NodeLabel> labels;
    std::optional<ClusterSnapshot> last_snapshot;
    std::uint64_t interactions = 0;
};

class Simulation {
public:
    /// Validates the config and builds round-0 state. Throws ConfigError or
    /// TraceError.
    explicit Simulation(ScenarioConfig cfg);

    void run_round();
    bool finished() const { return world_.round >= cfg_.n_rounds; }

    const ScenarioConfig& config() const { return cfg_; }
    const WorldState& world() const { return world_; }
    const std::vector<ClusterSnapshot>& snapshots() const { return snapshots_; }
    const std::vector<Event>& events() const { return events_; }
    const std::vector<RoundStats>& round_stats() const { return stats_; }

    /// Reading node `id` truly senses in `round`.
    Reading true_reading(NodeId id, Round round) const;

    ConfusionCounts confusion() const;

private:
    void log(Round round, EventType type, NodeId node, std::optional<NodeId> subject = std::nullopt,
             std::optional<double> value = std::nullopt);
    void deliver_floods(Round round);
    void deliver_fresh_alert(const AlertMessage& am, Round round);
    void queue_flood(const AlertMessage& am, NodeId forwarder, Round round);
    void note_blacklisted(NodeId id, Round round);
    void update_labels();

    ScenarioConfig cfg_;
    WorldState world_;
    std::optional<TraceTable> trace_;
    std::vector<ClusterSnapshot> snapshots_;
    std::vector<Event> events_;
    std::vector<RoundStats> stats_;
};

struct RunResult {
    std::vector<ClusterSnapshot> snapshots;
    std::vector<Event> events;
    std::vector<RoundStats> round_stats;
    std::vector<AvailabilityPoint> availability;
    GroundTruth ground_truth;
    ConfusionCounts counts;
    MetricsReport report;
};

/// Runs all n_rounds. Config errors surface before round 0.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace confinit
