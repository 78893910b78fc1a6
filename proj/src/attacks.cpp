#include "confinit/attacks.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace confinit {

void AttackConfig::validate() const
{
    if (!(fdi_offset_min > 0.0) || !(fdi_offset_max > 0.0)) {
        throw std::invalid_argument("fdi offsets must be > 0");
    }
    if (fdi_offset_min > fdi_offset_max) throw std::invalid_argument("fdi_offset_min must be <= fdi_offset_max");
    if (churn_honest_rounds < 1 || churn_false_rounds < 1) {
        throw std::invalid_argument("churn phase lengths must be >= 1");
    }
    if (!(sensitive_margin > 0.0)) throw std::invalid_argument("sensitive_margin must be > 0");
    if (churn_magnitude == AttackType::churn) throw std::invalid_argument("churn_magnitude must be fdi or sensitive");
}

std::string_view to_string(AttackType type)
{
    switch (type) {
    case AttackType::fdi: return "fdi";
    case AttackType::churn: return "churn";
    case AttackType::sensitive: return "sensitive";
    }
    return "?";
}

std::optional<AttackType> parse_attack_type(std::string_view text)
{
    if (text == "fdi") return AttackType::fdi;
    if (text == "churn") return AttackType::churn;
    if (text == "sensitive") return AttackType::sensitive;
    return std::nullopt;
}

std::string_view to_string(ForgeSign sign)
{
    switch (sign) {
    case ForgeSign::random: return "random";
    case ForgeSign::positive: return "positive";
    case ForgeSign::negative: return "negative";
    }
    return "?";
}

std::optional<ForgeSign> parse_forge_sign(std::string_view text)
{
    if (text == "random") return ForgeSign::random;
    if (text == "positive") return ForgeSign::positive;
    if (text == "negative") return ForgeSign::negative;
    return std::nullopt;
}

bool churn_is_false_phase(Round round, const AttackConfig& cfg)
{
    const std::uint64_t period = std::uint64_t{cfg.churn_honest_rounds} + cfg.churn_false_rounds;
    return round % period >= cfg.churn_honest_rounds;
}

bool attacker_forges(Round round, const AttackConfig& cfg)
{
    return cfg.type != AttackType::churn || churn_is_false_phase(round, cfg);
}

namespace {

double draw_sign(ForgeSign sign, CounterRng& rng)
{
    switch (sign) {
    case ForgeSign::positive: return 1.0;
    case ForgeSign::negative: return -1.0;
    case ForgeSign::random: break;
    }
    return rng.coin() ? 1.0 : -1.0;
}

}  // namespace

Reading forge_reading(Reading true_reading, Reading local_aggregate, const AttackConfig& cfg, double cthresh,
                      CounterRng& rng)
{
    const AttackType rule = cfg.type == AttackType::churn ? cfg.churn_magnitude : cfg.type;
    if (rule == AttackType::sensitive) {
        // (0, margin]: 1 - [0,1) lands in (0, 1].
        const double v = cfg.sensitive_margin * (1.0 - rng.uniform01());
        return local_aggregate + draw_sign(cfg.forge_sign, rng) * (cthresh + v);
    }
    const double offset = rng.uniform(cfg.fdi_offset_min, cfg.fdi_offset_max);
    return true_reading + draw_sign(cfg.forge_sign, rng) * offset;
}

GroundTruth select_attackers(std::uint32_t n_nodes, double attacker_fraction, std::uint64_t seed)
{
    GroundTruth gt;
    gt.is_attacker.assign(n_nodes, false);
    const auto k = static_cast<std::size_t>(std::llround(attacker_fraction * n_nodes));
    std::vector<std::uint32_t> ids(n_nodes);
    std::iota(ids.begin(), ids.end(), 0U);
    CounterRng rng(seed, StreamPurpose::attacker_selection);
    for (std::size_t i = 0; i < k && i < ids.size(); ++i) {
        const auto j = i + rng.below(ids.size() - i);
        std::swap(ids[i], ids[j]);
        gt.is_attacker[ids[i]] = true;
    }
    gt.attackers_inserted = std::min<std::size_t>(k, n_nodes);
    return gt;
}

}  // namespace confinit
