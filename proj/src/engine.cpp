#include "confinit/engine.hpp"

#include "confinit/rng.hpp"
#include "confinit/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace confinit {

void ScenarioConfig::validate() const
{
    auto wrap = [](auto&& check) {
        try {
            check();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    };
    if (n_nodes < 2) throw ConfigError("n_nodes must be >= 2");
    if (n_rounds < 1) throw ConfigError("n_rounds must be >= 1");
    if (!(area_width_m > 0.0) || !(area_height_m > 0.0)) throw ConfigError("area dimensions must be > 0");
    if (!(tx_radius_m > 0.0)) throw ConfigError("tx_radius_m must be > 0");
    if (!(attacker_fraction >= 0.0 && attacker_fraction < 1.0)) {
        throw ConfigError("attacker_fraction must be in [0, 1)");
    }
    if (!(crash_fraction >= 0.0 && crash_fraction <= 1.0)) throw ConfigError("crash_fraction must be in [0, 1]");
    wrap([&] { cluster.validate(); });
    wrap([&] { detection.validate(); });
    wrap([&] { attack.validate(); });
    wrap([&] { field.validate(); });
    if (positions && positions->size() != n_nodes) throw ConfigError("positions must list n_nodes points");
    if (attackers) {
        for (NodeId id : *attackers) {
            if (to_index(id) >= n_nodes) throw ConfigError("attacker id out of range");
        }
    }
}

std::string_view to_string(EventType type)
{
    switch (type) {
    case EventType::dm_sent: return "dm_sent";
    case EventType::dm_discarded: return "dm_discarded";
    case EventType::suspect_added: return "suspect_added";
    case EventType::suspect_cleared: return "suspect_cleared";
    case EventType::attacker_detected: return "attacker_detected";
    case EventType::alert_forwarded: return "alert_forwarded";
    case EventType::node_excluded: return "node_excluded";
    }
    return "?";
}

void write_event_row(std::ostream& out, const Event& e)
{
    out << e.round << ',' << to_string(e.type) << ',' << to_index(e.node) << ',';
    if (e.subject) out << to_index(*e.subject);
    out << ',';
    if (e.value) out << format_double(*e.value);
    out << '\n';
}

std::vector<Point> place_nodes(const ScenarioConfig& cfg)
{
    std::vector<Point> points;
    points.reserve(cfg.n_nodes);
    for (std::uint32_t i = 0; i < cfg.n_nodes; ++i) {
        CounterRng rng(cfg.seed, StreamPurpose::placement, i);
        const double x = rng.uniform(0.0, cfg.area_width_m);
        const double y = rng.uniform(0.0, cfg.area_height_m);
        points.push_back({x, y});
    }
    return points;
}

Adjacency compute_adjacency(std::span<const Point> positions, double tx_radius_m)
{
    Adjacency adj(positions.size());
    for (std::size_t u = 0; u < positions.size(); ++u) {
        for (std::size_t v = u + 1; v < positions.size(); ++v) {
            const double d = std::hypot(positions[u].x - positions[v].x, positions[u].y - positions[v].y);
            if (d <= tx_radius_m) {
                adj[u].push_back(node_id(static_cast<std::uint32_t>(v)));
                adj[v].push_back(node_id(static_cast<std::uint32_t>(u)));
            }
        }
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

namespace {

GroundTruth fixed_attackers(std::uint32_t n, const std::vector<NodeId>& ids)
{
    GroundTruth gt;
    gt.is_attacker.assign(n, false);
    for (NodeId id : ids) gt.is_attacker[to_index(id)] = true;
    gt.attackers_inserted = static_cast<std::size_t>(std::count(gt.is_attacker.begin(), gt.is_attacker.end(), true));
    return gt;
}

std::vector<bool> select_crashed(const ScenarioConfig& cfg, const GroundTruth& gt)
{
    std::vector<bool> crashed(cfg.n_nodes, false);
    std::vector<std::uint32_t> honest;
    for (std::uint32_t i = 0; i < cfg.n_nodes; ++i) {
        if (!gt.is_attacker[i]) honest.push_back(i);
    }
    const auto k = static_cast<std::size_t>(std::llround(cfg.crash_fraction * static_cast<double>(honest.size())));
    CounterRng rng(cfg.seed, StreamPurpose::crash_selection);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.below(honest.size() - i);
        std::swap(honest[i], honest[j]);
        crashed[honest[i]] = true;
    }
    return crashed;
}

}  // namespace

Simulation::Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    if (cfg_.trace_path) {
        trace_ = load_trace(*cfg_.trace_path);
        if (trace_->n_nodes() != cfg_.n_nodes) {
            throw TraceError("trace has " + std::to_string(trace_->n_nodes()) + " nodes, scenario expects " +
                             std::to_string(cfg_.n_nodes));
        }
        if (trace_->n_rounds() < cfg_.n_rounds) {
            throw TraceError("trace has " + std::to_string(trace_->n_rounds()) + " rounds, scenario needs " +
                             std::to_string(cfg_.n_rounds));
        }
    }

    world_.positions = cfg_.positions ? *cfg_.positions : place_nodes(cfg_);
    world_.adjacency = compute_adjacency(world_.positions, cfg_.tx_radius_m);
    world_.ground_truth = cfg_.attackers ? fixed_attackers(cfg_.n_nodes, *cfg_.attackers)
                                         : select_attackers(cfg_.n_nodes, cfg_.attacker_fraction, cfg_.seed);
    world_.nodes.resize(cfg_.n_nodes);
    for (std::uint32_t i = 0; i < cfg_.n_nodes; ++i) world_.nodes[i].id = node_id(i);
    world_.crashed = select_crashed(cfg_, world_.ground_truth);
    world_.excluded.assign(cfg_.n_nodes, false);
    world_.first_detected.assign(cfg_.n_nodes, std::nullopt);
    world_.labels.assign(cfg_.n_nodes, NodeLabel::honest);
    snapshots_.reserve(cfg_.n_rounds);
    stats_.reserve(cfg_.n_rounds);
}

Reading Simulation::true_reading(NodeId id, Round round) const
{
    if (trace_) return trace_->at(round, id);
    return synth_reading(world_.positions[to_index(id)], id, round, cfg_.field, cfg_.seed);
}

void Simulation::log(Round round, EventType type, NodeId node, std::optional<NodeId> subject,
                     std::optional<double> value)
{
    events_.push_back({round, type, node, subject, value});
}

void Simulation::note_blacklisted(NodeId id, Round round)
{
    auto& first = world_.first_detected[to_index(id)];
    if (!first) first = round;
}

void Simulation::queue_flood(const AlertMessage& am, NodeId forwarder, Round round)
{
    log(round, EventType::alert_forwarded, forwarder, am.attacker, am.attacker_reading);
    world_.pending_alerts.push_back({am, round + 1});
}

void Simulation::deliver_floods(Round round)
{
    std::vector<WorldState::PendingAlert> due;
    std::vector<WorldState::PendingAlert> later;
    for (auto& p : world_.pending_alerts) (p.delivery_round <= round ? due : later).push_back(std::move(p));
    world_.pending_alerts = std::move(later);

    const auto leaders = world_.last_snapshot ? world_.last_snapshot->all_leaders() : std::vector<NodeId>{};
    std::set<NodeId> seen;
    for (const auto& p : due) {
        const NodeId attacker = *p.alert.attacker;
        if (!seen.insert(attacker).second) continue;
        if (!world_.excluded[to_index(attacker)]) {
            world_.excluded[to_index(attacker)] = true;
            log(round, EventType::node_excluded, attacker, p.alert.detector, p.alert.attacker_reading);
        }
        for (NodeId leader : leaders) {
            if (world_.crashed[to_index(leader)] && round >= cfg_.crash_round) continue;
            const auto handled = handle_alert(world_.nodes[to_index(leader)], p.alert, true, round);
            if (handled.newly_blacklisted) note_blacklisted(attacker, round);
            if (handled.forward) queue_flood(p.alert, leader, round);
        }
    }
}

void Simulation::deliver_fresh_alert(const AlertMessage& am, Round round)
{
    const NodeId detector = *am.detector;
    std::vector<NodeId> targets;
    if (world_.last_snapshot) {
        if (auto idx = world_.last_snapshot->cluster_of(detector)) targets = world_.last_snapshot->leaders[*idx];
        if (targets.empty()) {
            for (NodeId n : world_.adjacency[to_index(detector)]) {
                if (world_.last_snapshot->is_leader(n)) targets.push_back(n);
            }
        }
    }
    if (targets.empty()) {
        // No leader in reach: the detector relays onto the overlay itself.
        queue_flood(am, detector, round);
        return;
    }
    for (NodeId leader : targets) {
        if (leader == detector) {
            queue_flood(am, detector, round);
            continue;
        }
        const auto handled = handle_alert(world_.nodes[to_index(leader)], am, true, round);
        if (handled.newly_blacklisted) note_blacklisted(*am.attacker, round);
        if (handled.forward) queue_flood(am, leader, round);
    }
}

void Simulation::update_labels()
{
    std::vector<bool> suspected(cfg_.n_nodes, false);
    for (const auto& node : world_.nodes) {
        for (const auto& [id, entry] : node.suspects) suspected[to_index(id)] = true;
    }
    for (std::uint32_t i = 0; i < cfg_.n_nodes; ++i) {
        NodeLabel next = NodeLabel::honest;
        if (world_.first_detected[i]) {
            next = NodeLabel::attacker;
        } else if (suspected[i]) {
            next = NodeLabel::suspicious;
        }
        world_.labels[i] = transition_label(world_.labels[i], next);
    }
}

void Simulation::run_round()
{
    if (finished()) throw std::logic_error("scenario already finished");
    const Round round = world_.round;
    const auto n = cfg_.n_nodes;
    RoundStats stats;

    auto alive = [&](std::uint32_t i) { return !(world_.crashed[i] && round >= cfg_.crash_round); };

    // (1) every live, non-excluded node broadcasts one DM.
    std::vector<std::optional<DataMessage>> outbox(n);
    std::vector<Reading> own_reading(n, 0.0);
    std::vector<Reading> own_aggregate(n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        const NodeId id = node_id(i);
        own_reading[i] = true_reading(id, round);
        const auto& table = world_.nodes[i].table;
        own_aggregate[i] = aggregate_over_similar(own_reading[i], table);
        if (!alive(i) || world_.excluded[i]) continue;

        std::optional<Reading> forged;
        if (world_.ground_truth.is_attacker[i] && attacker_forges(round, cfg_.attack)) {
            CounterRng rng(cfg_.seed, StreamPurpose::forging, i, round);
            forged = forge_reading(own_reading[i], own_aggregate[i], cfg_.attack, cfg_.cluster.cthresh, rng);
        }
        outbox[i] = build_data_message(id, own_reading[i], table, forged);
        ++stats.dms_emitted;
        log(round, EventType::dm_sent, id, std::nullopt, outbox[i]->individual_reading);
    }

    // (2) delivery and processing, receivers and senders in ascending id order.
    std::vector<AlertMessage> fresh_alerts;
    for (std::uint32_t j = 0; j < n; ++j) {
        if (!alive(j) || world_.excluded[j]) continue;
        NodeState& receiver = world_.nodes[j];
        std::vector<std::pair<NodeId, Similarity>> verdicts;
        for (NodeId sender : world_.adjacency[j]) {
            const auto& dm = outbox[to_index(sender)];
            if (!dm || is_blacklisted(receiver, sender)) continue;
            ++stats.dms_delivered;
            if (validate_data_message(*dm) == Verdict::discard) {
                log(round, EventType::dm_discarded, node_id(j), sender);
                continue;
            }
            ++world_.interactions;
            verdicts.emplace_back(
                sender, handle_data_message(receiver.table, *dm, own_reading[j], own_aggregate[j], cfg_.cluster, round));
        }
        if (!cfg_.detection.detection_enabled) continue;
        for (const auto& [sender, verdict] : verdicts) {
            const Reading reading = *outbox[to_index(sender)]->individual_reading;
            auto outcome = process_suspect(receiver, own_reading[j], sender, reading, verdict, cfg_.detection, round);
            switch (outcome.action) {
            case SuspectAction::suspect_added:
                log(round, EventType::suspect_added, node_id(j), sender, reading);
                break;
            case SuspectAction::suspect_cleared:
                log(round, EventType::suspect_cleared, node_id(j), sender, reading);
                break;
            case SuspectAction::attacker_detected:
                log(round, EventType::attacker_detected, node_id(j), sender, reading);
                note_blacklisted(sender, round);
                fresh_alerts.push_back(*outcome.alert);
                break;
            case SuspectAction::none:
            case SuspectAction::pending:
                break;
            }
        }
    }

    // (3) last round's forwards flood the leader overlay; fresh alerts reach
    // the detector's own leaders now.
    deliver_floods(round);
    for (const auto& am : fresh_alerts) deliver_fresh_alert(am, round);

    // (4) maintenance.
    for (std::uint32_t i = 0; i < n; ++i) {
        if (alive(i)) prune_stale_neighbors(world_.nodes[i].table, round, cfg_.cluster);
    }

    // (5) election and snapshot over live nodes nobody has blacklisted.
    std::map<NodeId, std::set<NodeId>> similar_sets;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!alive(i) || world_.excluded[i] || world_.first_detected[i]) continue;
        similar_sets.emplace(node_id(i), world_.nodes[i].table.similar_set());
    }
    ClusterSnapshot snap = extract_clusters(similar_sets, round);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto& node = world_.nodes[i];
        if (snap.is_leader(node.id)) {
            node.role = NodeRole::leader;
        } else {
            node.role = node.table.similar_set().empty() ? NodeRole::isolated : NodeRole::common;
        }
    }
    update_labels();
    stats.blacklisted_count = static_cast<std::size_t>(
        std::count_if(world_.first_detected.begin(), world_.first_detected.end(), [](const auto& r) { return r.has_value(); }));

    world_.last_snapshot = snap;
    snapshots_.push_back(std::move(snap));
    stats_.push_back(stats);
    ++world_.round;
}

ConfusionCounts Simulation::confusion() const
{
    ConfusionCounts c;
    c.attackers_inserted = world_.ground_truth.attackers_inserted;
    c.total_interactions = world_.interactions;
    for (std::uint32_t i = 0; i < cfg_.n_nodes; ++i) {
        const bool detected = world_.first_detected[i].has_value();
        if (world_.ground_truth.is_attacker[i]) {
            detected ? ++c.tp : ++c.fn;
        } else {
            detected ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

RunResult run_scenario(const ScenarioConfig& cfg)
{
    Simulation sim(cfg);
    while (!sim.finished()) sim.run_round();
    RunResult result;
    result.snapshots = sim.snapshots();
    result.events = sim.events();
    result.round_stats = sim.round_stats();
    result.ground_truth = sim.world().ground_truth;
    result.availability = cluster_availability(result.snapshots, result.ground_truth);
    result.counts = sim.confusion();
    result.report = make_report(result.counts, result.availability);
    return result;
}

}  // namespace confinit
