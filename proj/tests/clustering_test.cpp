#include "confinit/clustering.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace confinit;
using confinit::test::dm;
using confinit::test::unit_weight;

TEST_CASE("aggregate_reading matches the worked example")
{
    CHECK(aggregate_reading(16, unit_weight({15, 18})) == doctest::Approx(49.0 / 3).epsilon(1e-12));
    CHECK(aggregate_reading(15, unit_weight({16})) == doctest::Approx(15.5));
    CHECK(aggregate_reading(42, {}) == 42.0);

    std::vector<NeighborRecord> weighted{{node_id(1), 0, 10, 3, 0}, {node_id(2), 0, 20, 0, 0}};
    // (5 + 10*3 + 20*0) / (1 + 3)
    CHECK(aggregate_reading(5, weighted) == doctest::Approx(35.0 / 4));
}

TEST_CASE("is_similar is strict on both comparisons")
{
    const ClusterConfig cfg{3.0, 3};
    CHECK_FALSE(is_similar(45, 16, 16, 16, cfg));
    CHECK(is_similar(16, 16, 16, 16, cfg));
    CHECK_FALSE(is_similar(19, 16, 16, 16, cfg));  // |19 - 16| == 3
    CHECK_FALSE(is_similar(16, 13, 16, 16, cfg));  // |16 - 13| == 3
    CHECK(is_similar(18.999, 16, 16, 16, cfg));
}

TEST_CASE("build_data_message")
{
    NeighborTable lone;
    auto m = build_data_message(node_id(4), 16, lone);
    CHECK(*m.sender == node_id(4));
    CHECK(*m.individual_reading == 16);
    CHECK(*m.aggregate_reading == 16);
    CHECK(*m.neighbor_count == 0);
    CHECK(validate_data_message(m) == Verdict::accept);

    NeighborTable table;
    table.upsert({node_id(0), 15, 15, 1, 1});
    table.upsert({node_id(2), 18, 18, 1, 1});
    table.upsert({node_id(9), 45, 16, 1, 1});  // heard but not similar
    table.mark_similar(node_id(0), true);
    table.mark_similar(node_id(2), true);
    auto b = build_data_message(node_id(1), 16, table);
    CHECK(*b.aggregate_reading == doctest::Approx(49.0 / 3));
    CHECK(*b.neighbor_count == 2);

    auto forged = build_data_message(node_id(1), 16, table, 45.0);
    CHECK(*forged.individual_reading == 45);
    CHECK(*forged.aggregate_reading == doctest::Approx(49.0 / 3));
}

TEST_CASE("handle_data_message")
{
    const ClusterConfig cfg{3.0, 3};
    NeighborTable table;

    SUBCASE("similar sender joins the similar set")
    {
        CHECK(handle_data_message(table, dm(1, 16, 16, 0), 15, 15, cfg, 1) == Similarity::similar);
        CHECK(table.is_similar(node_id(1)));
    }
    SUBCASE("forged reading is dissimilar")
    {
        CHECK(handle_data_message(table, dm(2, 45, 16, 0), 15, 15, cfg, 0) == Similarity::dissimilar);
        CHECK(table.contains(node_id(2)));
        CHECK_FALSE(table.is_similar(node_id(2)));
    }
    SUBCASE("a similar sender that drifts away is removed")
    {
        handle_data_message(table, dm(1, 16, 16, 0), 15, 15, cfg, 0);
        handle_data_message(table, dm(1, 30, 16, 0), 15, 15, cfg, 1);
        CHECK_FALSE(table.is_similar(node_id(1)));
    }
    SUBCASE("duplicate only refreshes last_seen_round")
    {
        handle_data_message(table, dm(1, 16, 16, 2), 15, 15, cfg, 4);
        auto before = table;
        handle_data_message(table, dm(1, 16, 16, 2), 15, 15, cfg, 5);
        CHECK(table.similar_set() == before.similar_set());
        auto rec = *table.find(node_id(1));
        CHECK(rec.last_seen_round == 5);
        rec.last_seen_round = 4;
        CHECK(rec == *before.find(node_id(1)));
    }
}

TEST_CASE("elect_leaders")
{
    std::vector<std::pair<NodeId, std::uint32_t>> fig7{
        {node_id(0), 1}, {node_id(1), 4}, {node_id(2), 2}, {node_id(3), 2}, {node_id(4), 1}};
    CHECK(elect_leaders(fig7) == std::vector<NodeId>{node_id(1)});

    std::vector<std::pair<NodeId, std::uint32_t>> tie{{node_id(7), 3}, {node_id(2), 3}, {node_id(5), 1}};
    CHECK(elect_leaders(tie) == std::vector<NodeId>{node_id(2), node_id(7)});

    CHECK(elect_leaders({}).empty());
}

TEST_CASE("prune_stale_neighbors")
{
    const ClusterConfig cfg{3.0, 2};
    NeighborTable table;
    table.upsert({node_id(1), 16, 16, 1, 3});
    table.upsert({node_id(2), 16, 16, 1, 10});
    table.upsert({node_id(3), 16, 16, 1, 8});
    table.mark_similar(node_id(1), true);
    table.mark_similar(node_id(3), true);

    CHECK(prune_stale_neighbors(table, 10, cfg) == std::vector<NodeId>{node_id(1)});
    CHECK_FALSE(table.contains(node_id(1)));
    CHECK_FALSE(table.is_similar(node_id(1)));
    CHECK(table.contains(node_id(2)));
    CHECK(table.contains(node_id(3)));  // exactly ttl rounds old

    NeighborTable empty;
    CHECK(prune_stale_neighbors(empty, 100, cfg).empty());
    CHECK(empty.empty());
}

TEST_CASE("extract_clusters")
{
    auto ids = [](std::initializer_list<std::uint32_t> xs) {
        std::set<NodeId> s;
        for (auto x : xs) s.insert(node_id(x));
        return s;
    };

    SUBCASE("five mutually similar nodes")
    {
        std::map<NodeId, std::set<NodeId>> sim;
        for (std::uint32_t i = 0; i < 5; ++i) {
            std::set<NodeId> others;
            for (std::uint32_t j = 0; j < 5; ++j) {
                if (j != i) others.insert(node_id(j));
            }
            sim[node_id(i)] = others;
        }
        auto snap = extract_clusters(sim, 7);
        REQUIRE(snap.clusters.size() == 1);
        CHECK(snap.clusters[0].size() == 5);
        CHECK(snap.leaders[0].size() == 5);
        CHECK(snap.round == 7);
    }
    SUBCASE("one-sided similarity does not join")
    {
        std::map<NodeId, std::set<NodeId>> sim{
            {node_id(0), ids({1})}, {node_id(1), ids({0, 2})}, {node_id(2), ids({})}};
        auto snap = extract_clusters(sim, 0);
        REQUIRE(snap.clusters.size() == 1);
        CHECK(snap.clusters[0] == std::vector<NodeId>{node_id(0), node_id(1)});
        CHECK_FALSE(snap.cluster_of(node_id(2)));
    }
    SUBCASE("two groups, and excluded nodes stay out")
    {
        std::map<NodeId, std::set<NodeId>> sim{{node_id(0), ids({1, 9})}, {node_id(1), ids({0})},
                                               {node_id(5), ids({6})},    {node_id(6), ids({5, 7})},
                                               {node_id(7), ids({6})}};
        // node 9 is absent (blacklisted) even though node 0 lists it.
        auto snap = extract_clusters(sim, 0);
        REQUIRE(snap.clusters.size() == 2);
        CHECK(snap.clusters[0] == std::vector<NodeId>{node_id(0), node_id(1)});
        CHECK(snap.clusters[1] == std::vector<NodeId>{node_id(5), node_id(6), node_id(7)});
        CHECK(snap.leaders[1] == std::vector<NodeId>{node_id(6)});
        CHECK(snap.is_leader(node_id(6)));
        CHECK_FALSE(snap.is_leader(node_id(5)));
    }
}
