// Attacker behavior: plain FDI forging, Churn phase alternation and
// Sensitive near-threshold forging.

#pragma once

#include "confinit/domain.hpp"
#include "confinit/rng.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace confinit {

enum class AttackType : std::uint8_t { fdi, churn, sensitive };
enum class ForgeSign : std::uint8_t { random, positive, negative };

struct AttackConfig {
    AttackType type = AttackType::fdi;
    double fdi_offset_min = 10.0;
    double fdi_offset_max = 30.0;
    std::uint32_t churn_honest_rounds = 5;
    std::uint32_t churn_false_rounds = 5;
    double sensitive_margin = 1.0;
    // Forging rule used during a churn attacker's false phase.
    AttackType churn_magnitude = AttackType::fdi;
    ForgeSign forge_sign = ForgeSign::random;

    void validate() const;
};

std::string_view to_string(AttackType type);
std::optional<AttackType> parse_attack_type(std::string_view text);
std::string_view to_string(ForgeSign sign);
std::optional<ForgeSign> parse_forge_sign(std::string_view text);

/// Rounds [0, H) honest, [H, H+F) false, repeating with period H+F.
bool churn_is_false_phase(Round round, const AttackConfig& cfg);

/// Whether a ground-truth attacker forges in this round.
bool attacker_forges(Round round, const AttackConfig& cfg);

/// fdi: true +/- U[min, max]. sensitive: local_aggregate +/- (cthresh + v),
/// v in (0, margin]. churn: the rule selected by churn_magnitude.
Reading forge_reading(Reading true_reading, Reading local_aggregate, const AttackConfig& cfg, double cthresh,
                      CounterRng& rng);

struct GroundTruth {
    std::vector<bool> is_attacker;  // indexed by node id
    std::size_t attackers_inserted = 0;

    bool attacker(NodeId id) const { return is_attacker.at(to_index(id)); }
    std::size_t honest_count() const { return is_attacker.size() - attackers_inserted; }
};

/// round(fraction * n) attackers drawn uniformly without replacement.
GroundTruth select_attackers(std::uint32_t n_nodes, double attacker_fraction, std::uint64_t seed);

}  // namespace confinit
