#include "confinit/detection.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace confinit;

namespace {

// Oracle values computed independently by direct evaluation of the
// population SD.
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSdWith45 = 10.884494578170465;  // sqrt(710.8333.../6)
constexpr double kSdWith22 = 2.581988897471611;   // sqrt(40/6)

const ConsensusRegion kRegion{{14, 15, 16, 17, 18}};

/// Detector 1 whose similar neighbors 0, 3, 4, 5 read 14, 16, 17, 18; its own
/// reading is 15.
NodeState detector_b()
{
    NodeState s;
    s.id = node_id(1);
    const std::pair<std::uint32_t, double> peers[] = {{0, 14}, {3, 16}, {4, 17}, {5, 18}};
    for (auto [id, r] : peers) {
        s.table.upsert({node_id(id), r, r, 4, 0});
        s.table.mark_similar(node_id(id), true);
    }
    return s;
}

}  // namespace

TEST_CASE("region_sd")
{
    CHECK(region_sd(kRegion.values) == doctest::Approx(kSqrt2).epsilon(1e-12));
    const std::vector<Reading> same{7, 7, 7};
    CHECK(region_sd(same) == 0.0);
    const std::vector<Reading> shifted{114, 115, 116, 117, 118};
    CHECK(region_sd(shifted) == doctest::Approx(kSqrt2).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(region_sd(std::vector<Reading>{}), "empty consensus region", std::invalid_argument);
}

TEST_CASE("classify_suspect")
{
    const DetectionConfig cfg{5.0, true};

    auto attacker = classify_suspect(kRegion, 45, cfg);
    CHECK(attacker.verdict == SuspectClass::attacker);
    CHECK(attacker.region_sd == doctest::Approx(kSqrt2).epsilon(1e-9));
    CHECK(*attacker.combined_sd == doctest::Approx(kSdWith45).epsilon(1e-9));

    auto at_mean = classify_suspect(kRegion, 16, cfg);
    CHECK(at_mean.verdict == SuspectClass::honest);
    CHECK(*at_mean.combined_sd <= at_mean.region_sd);

    auto mild = classify_suspect(kRegion, 22, cfg);
    CHECK(mild.verdict == SuspectClass::honest);
    CHECK(*mild.combined_sd == doctest::Approx(kSdWith22).epsilon(1e-9));

    auto noisy = classify_suspect(ConsensusRegion{{0, 20}}, 10, cfg);  // SD 10
    CHECK(noisy.verdict == SuspectClass::region_invalid);
    CHECK_FALSE(noisy.combined_sd);
}

TEST_CASE("classify_suspect boundary: SD equal to the threshold is honest")
{
    // {0} plus suspect 10 has population SD exactly 5.
    const DetectionConfig cfg{5.0, true};
    auto c = classify_suspect(ConsensusRegion{{0}}, 10, cfg);
    CHECK(*c.combined_sd == 5.0);
    CHECK(c.verdict == SuspectClass::honest);
}

TEST_CASE("consensus_region leaves out suspects, blacklisted ids and the sender")
{
    auto s = detector_b();
    CHECK(consensus_region(s, 15, node_id(2)).values == std::vector<Reading>{15, 14, 16, 17, 18});
    s.suspects[node_id(4)] = {0, 17};
    s.blacklist[node_id(5)] = {0, node_id(1), 18};
    CHECK(consensus_region(s, 15, node_id(0)).values == std::vector<Reading>{15, 16});
}

TEST_CASE("process_suspect follows the watchdog state machine")
{
    const DetectionConfig cfg{5.0, true};
    auto s = detector_b();
    const NodeId nc = node_id(2);

    // First dissimilar DM: suspect only.
    auto first = process_suspect(s, 15, nc, 45, Similarity::dissimilar, cfg, 0);
    CHECK(first.action == SuspectAction::suspect_added);
    CHECK_FALSE(first.alert);
    CHECK(s.suspects.contains(nc));

    SUBCASE("second DM confirms the attacker")
    {
        auto second = process_suspect(s, 15, nc, 45, Similarity::dissimilar, cfg, 1);
        CHECK(second.action == SuspectAction::attacker_detected);
        REQUIRE(second.alert);
        CHECK(*second.alert->detector == node_id(1));
        CHECK(*second.alert->attacker == nc);
        CHECK(*second.alert->attacker_reading == 45);
        CHECK(second.classification->region_sd == doctest::Approx(kSqrt2).epsilon(1e-9));
        CHECK(*second.classification->combined_sd == doctest::Approx(kSdWith45).epsilon(1e-9));
        CHECK(is_blacklisted(s, nc));
        CHECK_FALSE(s.suspects.contains(nc));
        CHECK(s.blacklist.at(nc).detected_round == 1);

        // Blacklisted senders are ignored from now on.
        auto after = process_suspect(s, 15, nc, 45, Similarity::dissimilar, cfg, 2);
        CHECK(after.action == SuspectAction::none);
    }
    SUBCASE("a suspect back within consensus is cleared")
    {
        auto second = process_suspect(s, 15, nc, 22, Similarity::dissimilar, cfg, 1);
        CHECK(second.action == SuspectAction::suspect_cleared);
        CHECK_FALSE(s.suspects.contains(nc));
        CHECK_FALSE(is_blacklisted(s, nc));
    }
    SUBCASE("a non-consensual region leaves the suspect pending")
    {
        s.table.upsert({node_id(0), 40, 40, 4, 0});
        auto second = process_suspect(s, 15, nc, 45, Similarity::dissimilar, cfg, 1);
        CHECK(second.action == SuspectAction::pending);
        CHECK(s.suspects.contains(nc));
    }
}

TEST_CASE("process_suspect: similar non-suspect and disabled detection are no-ops")
{
    auto s = detector_b();
    auto similar = process_suspect(s, 15, node_id(0), 14, Similarity::similar, {5.0, true}, 0);
    CHECK(similar.action == SuspectAction::none);
    CHECK(s.suspects.empty());

    auto off = process_suspect(s, 15, node_id(2), 45, Similarity::dissimilar, {5.0, false}, 0);
    CHECK(off.action == SuspectAction::none);
    CHECK(s.suspects.empty());
    CHECK(s.blacklist.empty());
}

TEST_CASE("emit_alert")
{
    auto a = emit_alert(node_id(1), node_id(2), 45);
    CHECK(validate_alert_message(a) == Verdict::accept);
    CHECK(a == emit_alert(node_id(1), node_id(2), 45));
    CHECK_THROWS_AS(emit_alert(node_id(3), node_id(3), 45), std::logic_error);
}

TEST_CASE("handle_alert")
{
    const auto am = emit_alert(node_id(1), node_id(2), 45);

    NodeState leader;
    leader.id = node_id(4);
    leader.table.upsert({node_id(2), 45, 16, 0, 0});
    leader.suspects[node_id(2)] = {0, 45};

    auto first = handle_alert(leader, am, true, 2);
    CHECK(first.newly_blacklisted);
    CHECK(first.forward);
    CHECK(is_blacklisted(leader, node_id(2)));
    CHECK_FALSE(leader.table.contains(node_id(2)));
    CHECK(leader.suspects.empty());
    CHECK(leader.blacklist.at(node_id(2)).detector == node_id(1));

    const auto snapshot = leader;
    auto again = handle_alert(leader, am, true, 3);
    CHECK_FALSE(again.newly_blacklisted);
    CHECK_FALSE(again.forward);
    CHECK(leader == snapshot);

    NodeState common;
    common.id = node_id(6);
    auto c = handle_alert(common, am, false, 2);
    CHECK(c.newly_blacklisted);
    CHECK_FALSE(c.forward);
    CHECK(is_blacklisted(common, node_id(2)));

    NodeState fresh;
    CHECK_FALSE(is_blacklisted(fresh, node_id(2)));
    CHECK_FALSE(is_blacklisted(fresh, node_id(12345)));
}
