// Core value types shared by every CONFINIT module: node identity, readings,
// the two wire records (DM, AM), node labels and roles.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace confinit {

enum class NodeId : std::uint32_t {};

constexpr std::uint32_t to_index(NodeId id) { return static_cast<std::uint32_t>(id); }
constexpr NodeId node_id(std::uint32_t index) { return static_cast<NodeId>(index); }

/// One scalar sensor sample (e.g. gas pressure). Must be finite.
using Reading = double;

/// Round counter of the synchronous DM exchange.
using Round = std::uint32_t;

/// Position in meters.
struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

enum class MessageKind : std::uint8_t { dm, am, unknown };

/// Data message <DM, Id, L_ind, N_viz, L_agr>. Fields are optional because a
/// record taken off the wire may be incomplete; validate before use.
struct DataMessage {
    MessageKind kind = MessageKind::dm;
    std::optional<NodeId> sender;
    std::optional<Reading> individual_reading;
    std::optional<Reading> aggregate_reading;
    std::optional<std::uint32_t> neighbor_count;

    bool operator==(const DataMessage&) const = default;
};

/// Alert message <AM, Id_int, Id_ataq, L_ataq>.
struct AlertMessage {
    MessageKind kind = MessageKind::am;
    std::optional<NodeId> detector;
    std::optional<NodeId> attacker;
    std::optional<Reading> attacker_reading;

    bool operator==(const AlertMessage&) const = default;
};

enum class Verdict : std::uint8_t { accept, discard };

Verdict validate_data_message(const DataMessage& msg);
Verdict validate_alert_message(const AlertMessage& msg);

enum class NodeLabel : std::uint8_t { honest, suspicious, attacker };

enum class NodeRole : std::uint8_t { common, leader, isolated };

// honest <-> suspicious, suspicious -> attacker; attacker is absorbing.
// Staying on the same label is not a transition and is always allowed.
bool label_transition_allowed(NodeLabel from, NodeLabel to);

/// Applies a transition, throwing std::logic_error on a forbidden arc.
NodeLabel transition_label(NodeLabel from, NodeLabel to);

std::string_view to_string(NodeLabel label);
std::string_view to_string(NodeRole role);

}  // namespace confinit

template <>
struct std::hash<confinit::NodeId> {
    std::size_t operator()(confinit::NodeId id) const noexcept
    {
        return std::hash<std::uint32_t>{}(confinit::to_index(id));
    }
};
