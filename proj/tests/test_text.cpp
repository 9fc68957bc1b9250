#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace ifspec;

namespace
{

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST(Parse, AlarmFixture)
{
    const auto r = parse_file(std::string(IFSPEC_MODELS_DIR) + "/alarm.ifm");
    ASSERT_TRUE(r);
    EXPECT_EQ(r.model->name, "AlarmSystem");
    EXPECT_EQ(r.model->initial, "Deactivated");
    EXPECT_EQ(r.model->states.size(), 3u);
    EXPECT_EQ(r.model->rules.size(), 9u);
    EXPECT_EQ(*r.model, alarm_model());
}

TEST(Parse, ParametersAndSorts)
{
    const auto r = parse_file(std::string(IFSPEC_MODELS_DIR) + "/valve.ifm");
    ASSERT_TRUE(r);
    const auto* d = r.model->find_event("configure");
    ASSERT_NE(d, nullptr);
    ASSERT_EQ(d->params.size(), 3u);
    EXPECT_EQ(d->params[0].sort, Sort::integer);
    EXPECT_EQ(d->params[2].sort, Sort::string);
}

TEST(Parse, SyntaxErrorHasPosition)
{
    const auto r = parse("interface X {\n  initial A;\n  in go;\n  reply ok;\n  state A { on go -> A reply }\n}");
    ASSERT_FALSE(r);
    ASSERT_FALSE(r.errors.empty());
    EXPECT_EQ(r.errors[0].code, "syntax");
    EXPECT_EQ(r.errors[0].span.line, 5u);
    EXPECT_NE(format_parse_error("x.ifm", r.errors[0]).find("x.ifm:5:"), std::string::npos);
}

TEST(Parse, UnknownSortAndDuplicates)
{
    auto r = parse("interface X { initial A; in go(n: float); reply ok; state A { on go illegal; } }");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.errors[0].code, "unknown-sort");
    r = parse("interface X { initial A; in go; in go; reply ok; state A { on go illegal; } }");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.errors[0].code, "duplicate-declaration");
}

TEST(Parse, MissingFileThrowsIo)
{
    try {
        parse_file("/nonexistent/x.ifm");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "io");
    }
}

TEST(Parse, EmptyInputFails)
{
    EXPECT_FALSE(parse(""));
    EXPECT_FALSE(parse("# only a comment\n"));
}

TEST(Serialize, MinimalModelIsSixLines)
{
    const auto r = parse("interface U { initial S; in go; reply ok; state S { on go -> S reply ok; } }");
    ASSERT_TRUE(r);
    const auto text = serialize(*r.model);
    EXPECT_EQ(count(text, "\n"), 6u);
}

TEST(Serialize, FixtureFilesAreCanonical)
{
    EXPECT_EQ(slurp(std::string(IFSPEC_MODELS_DIR) + "/terminal.ifm"), serialize(terminal_model()));
    const auto truck = parse_file(std::string(IFSPEC_MODELS_DIR) + "/truck.ifm");
    ASSERT_TRUE(truck);
    EXPECT_EQ(*truck.model, truck_model());
}

TEST(Property, ParseSerializeRoundTrip)
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
        const auto m = oracle::random_model(rng, {.params = true});
        const auto text = serialize(m);
        const auto back = parse(text);
        ASSERT_TRUE(back) << text;
        EXPECT_TRUE(oracle::isomorphic(m, *back.model));
        EXPECT_EQ(serialize(*back.model), text);
    }
}

TEST(Dot, AlarmHasThreeNodes)
{
    const auto dot = render_dot(alarm_model(), false);
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    std::size_t nodes = 0;
    std::istringstream lines(dot);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("  \"", 0) == 0 && line.find("->") == std::string::npos) ++nodes;
    }
    EXPECT_EQ(nodes, 3u);
    EXPECT_EQ(count(dot, "doublecircle"), 1u);
    EXPECT_EQ(count(dot, "->"), 4u);
    EXPECT_EQ(dot.find("__ILLEGAL__"), std::string::npos);
    EXPECT_NE(dot.find("triggered / ok [+NI_Triggered]"), std::string::npos);
}

TEST(Dot, IllegalAddsSink)
{
    const auto dot = render_dot(alarm_model(), true);
    EXPECT_NE(dot.find("\"__ILLEGAL__\""), std::string::npos);
    EXPECT_EQ(count(dot, "style=dashed"), 5u);
}

TEST(Dot, QuotesNames)
{
    EXPECT_EQ(dot_quote("a\"b"), "\"a\\\"b\"");
}
