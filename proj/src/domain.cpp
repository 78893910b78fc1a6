#include "confinit/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace confinit {

namespace {

bool finite_present(const std::optional<Reading>& r) { return r.has_value() && std::isfinite(*r); }

}  // namespace

Verdict validate_data_message(const DataMessage& msg)
{
    if (msg.kind != MessageKind::dm) return Verdict::discard;
    if (!msg.sender || !msg.neighbor_count) return Verdict::discard;
    if (!finite_present(msg.individual_reading) || !finite_present(msg.aggregate_reading)) {
        return Verdict::discard;
    }
    return Verdict::accept;
}

Verdict validate_alert_message(const AlertMessage& msg)
{
    if (msg.kind != MessageKind::am) return Verdict::discard;
    if (!msg.detector || !msg.attacker || !finite_present(msg.attacker_reading)) {
        return Verdict::discard;
    }
    if (*msg.detector == *msg.attacker) return Verdict::discard;
    return Verdict::accept;
}

bool label_transition_allowed(NodeLabel from, NodeLabel to)
{
    if (from == to) return true;
    switch (from) {
    case NodeLabel::honest: return to == NodeLabel::suspicious;
    case NodeLabel::suspicious: return true;
    case NodeLabel::attacker: return false;
    }
    return false;
}

NodeLabel transition_label(NodeLabel from, NodeLabel to)
{
    if (!label_transition_allowed(from, to)) {
        throw std::logic_error("forbidden label transition " + std::string(to_string(from)) + " -> " +
                               std::string(to_string(to)));
    }
    return to;
}

std::string_view to_string(NodeLabel label)
{
    switch (label) {
    case NodeLabel::honest: return "honest";
    case NodeLabel::suspicious: return "suspicious";
    case NodeLabel::attacker: return "attacker";
    }
    return "?";
}

std::string_view to_string(NodeRole role)
{
    switch (role) {
    case NodeRole::common: return "common";
    case NodeRole::leader: return "leader";
    case NodeRole::isolated: return "isolated";
    }
    return "?";
}

}  // namespace confinit
