#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace ifspec;

namespace
{

InterfaceModel valve()
{
    return *parse_file(std::string(IFSPEC_MODELS_DIR) + "/valve.ifm").model;
}

DomainSpec valve_domains(Combination c)
{
    DomainSpec d;
    d.combination = c;
    d.assignments[{"configure", "rate"}] = {std::int64_t{1}, std::int64_t{5}, std::int64_t{10}};
    d.assignments[{"configure", "pulses"}] = {std::int64_t{0}, std::int64_t{2}, std::int64_t{4}};
    d.assignments[{"configure", "medium"}] = {std::string("water"), std::string("acid"), std::string("brine")};
    return d;
}

std::string code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return {};
}

} // namespace

TEST(Pairwise, CartesianEnumeratesEverything)
{
    const auto rows = cartesian_rows({3, 3, 3});
    EXPECT_EQ(rows.size(), 27u);
    EXPECT_EQ(rows.front(), (CombinationRow{0, 0, 0}));
    EXPECT_EQ(rows[1], (CombinationRow{0, 0, 1}));
    EXPECT_EQ(std::set<CombinationRow>(rows.begin(), rows.end()).size(), 27u);
}

TEST(Pairwise, ThreeByThreeFitsNineRows)
{
    const auto rows = pairwise_rows({3, 3, 3});
    EXPECT_LE(rows.size(), 9u);
    EXPECT_TRUE(oracle::covers_all_pairs({3, 3, 3}, rows));
}

TEST(Pairwise, SmallShapes)
{
    EXPECT_EQ(pairwise_rows({}).size(), 1u);
    EXPECT_EQ(pairwise_rows({4}).size(), 4u);
    EXPECT_EQ(pairwise_rows({2, 3}).size(), 6u);
}

TEST(Property, PairwiseCoversAllPairs)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 150; ++i) {
        std::vector<std::size_t> sizes(static_cast<std::size_t>(std::uniform_int_distribution<int>(2, 6)(rng)));
        for (auto& s : sizes) s = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 5)(rng));
        const auto rows = pairwise_rows(sizes);
        ASSERT_TRUE(oracle::covers_all_pairs(sizes, rows));
        EXPECT_LE(rows.size(), cartesian_rows(sizes).size());
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < sizes.size(); ++k) ASSERT_LT(r[k], sizes[k]);
        }
    }
}

TEST(TestModel, AlarmActions)
{
    const auto tm = build_test_model(alarm_model());
    ASSERT_EQ(tm.actions.size(), 3u);
    EXPECT_EQ(tm.actions[0].label.name, "activate");
    EXPECT_EQ(tm.states[static_cast<std::size_t>(tm.initial)], "Deactivated");
    // two distinct expectations: ok, and NI_Triggered + ok
    EXPECT_EQ(tm.expectations.size(), 2u);
}

TEST(TestModel, RejectsInvalidModel)
{
    auto m = alarm_model();
    m.rules.pop_back();
    EXPECT_EQ(code_of([&] { build_test_model(m); }), "invalid-model");
}

TEST(Expand, CartesianAndPairwise)
{
    const auto tm = build_test_model(valve());
    EXPECT_EQ(expand_domains(tm, valve_domains(Combination::cartesian)).actions.size(), 2u + 27u);
    const auto pw = expand_domains(tm, valve_domains(Combination::pairwise));
    EXPECT_LE(pw.actions.size(), 2u + 9u);
    for (const auto& a : pw.actions) EXPECT_TRUE(a.ground());
}

TEST(Expand, DomainErrors)
{
    const auto tm = build_test_model(valve());
    auto d = valve_domains(Combination::cartesian);
    d.assignments.erase({"configure", "pulses"});
    EXPECT_EQ(code_of([&] { expand_domains(tm, d); }), "missing-domain");
    d = valve_domains(Combination::cartesian);
    d.assignments[{"configure", "pulses"}].clear();
    EXPECT_EQ(code_of([&] { expand_domains(tm, d); }), "empty-domain");
    d = valve_domains(Combination::cartesian);
    d.assignments[{"configure", "rate"}] = {std::string("fast")};
    EXPECT_EQ(code_of([&] { expand_domains(tm, d); }), "domain-type");
}

TEST(Explore, AlarmGraph)
{
    const auto g = explore(build_test_model(alarm_model()), 100);
    EXPECT_EQ(g.nodes, (std::vector<std::string>{"Deactivated", "Activated", "Triggered"}));
    EXPECT_EQ(g.edges.size(), 4u);
    EXPECT_EQ(g.out_edges(0).size(), 1u);
    EXPECT_EQ(g.out_edges(1).size(), 2u);
}

TEST(Explore, BudgetAndMissingDomain)
{
    EXPECT_EQ(code_of([&] { explore(build_test_model(terminal_model()), 10); }), "state-budget-exceeded");
    EXPECT_EQ(code_of([&] { explore(build_test_model(valve()), 10); }), "missing-domain");
    EXPECT_EQ(explore(build_test_model(terminal_model()), 96).nodes.size(), 96u);
}

TEST(Property, ExploreMatchesLegalTransitions)
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto m = oracle::random_model(rng, {.all_reachable = (i % 3) != 0});
        const auto g = explore(build_test_model(m), 1000);
        std::set<oracle::EdgeKey> got;
        for (const auto& e : g.edges) {
            const auto& x = g.expectations[static_cast<std::size_t>(e.expectation)];
            got.insert({g.nodes[static_cast<std::size_t>(e.from)], g.labels[static_cast<std::size_t>(e.label)].name, x.notifications, x.reply,
                        g.nodes[static_cast<std::size_t>(e.to)]});
        }
        ASSERT_EQ(got, oracle::legal_edges(m));
        EXPECT_EQ(got.size(), g.edges.size());
    }
}
