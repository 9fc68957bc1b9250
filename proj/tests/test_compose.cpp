#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace ifspec;

namespace
{

InterfaceModel unit()
{
    return *parse("interface Unit { initial U; reply ok; state U { } }").model;
}

// the grammar needs one declaration; borrowing a reply keeps the alphabet unchanged
InterfaceModel unit_for(const InterfaceModel& m)
{
    auto u = unit();
    for (const auto& d : m.alphabet) {
        if (d.kind == EventKind::reply) {
            u.alphabet = {d};
            break;
        }
    }
    return u;
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

TEST(AlphabetReport, SyncSetAndName)
{
    const auto plan = alphabet_report({terminal_model(), truck_model()});
    EXPECT_EQ(plan.sync_set, (std::vector<std::string>{"move_land", "move_quay1", "move_quay2"}));
    EXPECT_EQ(plan.product_name, "ContainerTerminal_TruckBattery");
    EXPECT_EQ(alphabet_report({alarm_model(), unit()}, "X").product_name, "X");
}

TEST(AlphabetReport, SignatureMismatch)
{
    auto other = *parse("interface O { initial A; in activate(n: int); reply ok; state A { on activate illegal; } }").model;
    try {
        alphabet_report({alarm_model(), other});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "signature-mismatch");
        EXPECT_NE(std::string(e.what()).find("activate"), std::string::npos);
    }
    auto kinds = *parse("interface O { initial A; in go; out ok; reply r; state A { on go illegal; } }").model;
    EXPECT_EQ(code_of([&] { alphabet_report({alarm_model(), kinds}); }), "signature-mismatch");
    EXPECT_EQ(code_of([&] { alphabet_report({alarm_model()}); }), "invalid-argument");
}

TEST(Compose, UnitLawOnAlarm)
{
    const auto p = compose({alarm_model(), unit()});
    EXPECT_TRUE(validate(p).ok);
    EXPECT_TRUE(oracle::isomorphic(p, alarm_model()));
    EXPECT_EQ(p.initial, "DeactivatedxU");
}

TEST(Compose, TerminalTimesTruck)
{
    const auto p = compose({terminal_model(), truck_model()});
    EXPECT_TRUE(validate(p).ok);
    EXPECT_EQ(p.states.size(), 96u * 4u);
    EXPECT_GE(reachable(p).size(), 50u);
    // shared move needs both; private stimuli move one side
    const auto out = step(p, p.initial, "move_quay1");
    ASSERT_TRUE(out);
    EXPECT_EQ(out->target, "Quay1AwayEmpty_H000xHalf");
    EXPECT_FALSE(step(p, p.initial, "charge"));
    EXPECT_EQ(step(p, p.initial, "dock")->target, "LandDockedEmpty_H000xFull");
}

TEST(Compose, ReplyConflict)
{
    auto a = *parse("interface A { initial S; in go; reply yes; reply no; state S { on go -> S reply yes; } }").model;
    auto b = *parse("interface B { initial T; in go; reply yes; reply no; state T { on go -> T reply no; } }").model;
    EXPECT_EQ(code_of([&] { compose({a, b}); }), "reply-conflict");
}

TEST(Compose, NameCollisionsGetSuffix)
{
    // S x xT and Sx x T both join to SxxT
    auto a = *parse("interface A { initial S; in a; reply ok; state S { on a -> Sx reply ok; } state Sx { on a illegal; } }").model;
    auto b = *parse("interface B { initial T; in b; reply ok; state T { on b -> xT reply ok; } state xT { on b illegal; } }").model;
    const auto p = compose({a, b});
    EXPECT_TRUE(validate(p).ok);
    EXPECT_EQ(std::set<std::string>(p.states.begin(), p.states.end()).size(), 4u);
    EXPECT_NE(std::find(p.states.begin(), p.states.end(), "SxxT_2"), p.states.end());
}

TEST(Compose, ProductSerializesAndReparses)
{
    const auto p = compose({alarm_model(), truck_model()});
    const auto back = parse(serialize(p));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back.model, p);
}

TEST(Property, UnitLawAndCommutativity)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 60; ++i) {
        auto a = oracle::random_model(rng, {.max_states = 5, .max_stimuli = 3, .prefix = "a"});
        auto b = oracle::random_model(rng, {.max_states = 5, .max_stimuli = 3, .prefix = "b"});
        // share one stimulus with equal reply so the components synchronize
        b.alphabet.push_back({"ain0", EventKind::stimulus, {}});
        const auto* a_reply = &a.alphabet.back();
        b.alphabet.push_back(*a_reply);
        for (const auto& s : b.states) {
            const bool legal = (std::hash<std::string>{}(s) % 2) == 0;
            b.rules.push_back({s, "ain0", legal ? std::optional<Transition>(Transition{{}, a_reply->name, s}) : std::nullopt});
        }
        for (auto& r : a.rules) {
            if (r.stimulus == "ain0" && r.response) r.response->reply = a_reply->name;
        }
        ASSERT_TRUE(validate(a).ok);
        ASSERT_TRUE(validate(b).ok) << serialize(b);

        const auto ab = compose({a, b});
        const auto ba = compose({b, a});
        EXPECT_TRUE(validate(ab).ok);
        EXPECT_TRUE(oracle::isomorphic(ab, ba, true));
        EXPECT_TRUE(oracle::isomorphic(compose({a, unit_for(a)}), a));
    }
}
