#ifndef IFSPEC_STRATEGIES_HPP
#define IFSPEC_STRATEGIES_HPP

#include "ifspec/testgen.hpp"

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace ifspec
{

struct TestStep
{
    GroundStimulus stimulus;
    std::vector<std::string> expect_notify;
    std::string expect_reply;

    bool operator==(const TestStep&) const = default;
};

struct TestCase
{
    std::size_t id = 0;
    std::vector<TestStep> steps;

    bool operator==(const TestCase&) const = default;
};

struct TestSuite
{
    std::string model;
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<TestCase> cases;

    bool operator==(const TestSuite&) const = default;
};

struct CoverageReport
{
    std::size_t transitions_total = 0;
    std::size_t transitions_covered = 0;
    std::vector<GraphEdge> uncovered;

    /// Covered share in percent; an edgeless graph counts as fully covered.
    double percent() const
    {
        return transitions_total == 0 ? 100.0 : 100.0 * static_cast<double>(transitions_covered) / static_cast<double>(transitions_total);
    }
};

/// `from --label--> to` for diagnostics.
inline std::string describe_edge(const StateGraph& g, const GraphEdge& e)
{
    return g.nodes[static_cast<std::size_t>(e.from)] + " --" + to_string(g.labels[static_cast<std::size_t>(e.label)]) +
           "--> " + g.nodes[static_cast<std::size_t>(e.to)];
}

namespace detail
{

inline TestStep make_step(const StateGraph& g, const GraphEdge& e)
{
    const auto& x = g.expectations[static_cast<std::size_t>(e.expectation)];
    return {g.labels[static_cast<std::size_t>(e.label)], x.notifications, x.reply};
}

constexpr std::size_t unreached = std::numeric_limits<std::size_t>::max();

/// BFS distances from the initial node with the edge used to reach each node first.
struct ShortestPathTree
{
    std::vector<std::size_t> dist;
    std::vector<std::size_t> via;

    explicit ShortestPathTree(const StateGraph& g)
        : dist(g.nodes.size(), unreached)
        , via(g.nodes.size(), unreached)
    {
        if (g.nodes.empty()) return;
        std::deque<std::int32_t> queue{StateGraph::initial};
        dist[0] = 0;
        while (!queue.empty()) {
            const auto n = queue.front();
            queue.pop_front();
            for (const auto& e : g.out_edges(n)) {
                const auto to = static_cast<std::size_t>(e.to);
                if (dist[to] != unreached) continue;
                dist[to] = dist[static_cast<std::size_t>(n)] + 1;
                via[to] = g.edge_index(e);
                queue.push_back(e.to);
            }
        }
    }

    /// Edge indices of the shortest path from the initial node to `node`.
    std::vector<std::size_t> path_to(const StateGraph& g, std::int32_t node) const
    {
        std::vector<std::size_t> path;
        auto n = static_cast<std::size_t>(node);
        while (via[n] != unreached) {
            path.push_back(via[n]);
            n = static_cast<std::size_t>(g.edges[via[n]].from);
        }
        return {path.rbegin(), path.rend()};
    }
};

/// Throws `unsatisfiable` for the first edge no case of `max_len` steps can reach.
inline void require_within(const StateGraph& g, const ShortestPathTree& tree, std::size_t max_len)
{
    for (const auto& e : g.edges) {
        const auto d = tree.dist[static_cast<std::size_t>(e.from)];
        if (d == unreached || d + 1 > max_len) {
            const std::string how = d == unreached ? "unreachable" : std::to_string(d + 1) + " steps";
            throw Error("unsatisfiable", "edge " + describe_edge(g, e) + " needs " + how + " from the initial state, max_len is " +
                                             std::to_string(max_len));
        }
    }
}

} // namespace detail

/**
 *  Short cases covering every edge within `max_len` steps of the initial state.
 *
 *  Each case follows the shortest path to the nearest uncovered edge, takes
 *  it, then keeps taking uncovered out-edges while it stays within
 *  `max_len`. The construction is deterministic; `seed` is only recorded.
 */
inline TestSuite gen_shorttests(const StateGraph& g, std::size_t max_len, std::uint64_t seed)
{
    if (max_len < 1) throw Error("invalid-argument", "max_len must be at least 1");
    TestSuite suite{g.model, "shorttests", seed, {}};
    const detail::ShortestPathTree tree(g);
    detail::require_within(g, tree, max_len);

    // edges by distance of their source, stable in edge order
    std::vector<std::size_t> by_depth(g.edges.size());
    {
        std::vector<std::size_t> count(g.nodes.size() + 1, 0);
        for (const auto& e : g.edges) ++count[tree.dist[static_cast<std::size_t>(e.from)] + 1];
        for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
        for (std::size_t i = 0; i < g.edges.size(); ++i) by_depth[count[tree.dist[static_cast<std::size_t>(g.edges[i].from)]]++] = i;
    }

    std::vector<char> covered(g.edges.size(), 0);
    std::vector<std::size_t> cursor = g.out_begin;
    std::size_t remaining = g.edges.size();
    std::size_t next = 0;
    while (remaining > 0) {
        while (covered[by_depth[next]]) ++next;
        const auto target = by_depth[next];
        auto path = tree.path_to(g, g.edges[target].from);
        path.push_back(target);

        TestCase tc;
        tc.id = suite.cases.size() + 1;
        auto take = [&](std::size_t idx) {
            if (!covered[idx]) {
                covered[idx] = 1;
                --remaining;
            }
            tc.steps.push_back(detail::make_step(g, g.edges[idx]));
        };
        for (auto idx : path) take(idx);
        auto at = g.edges[target].to;
        while (tc.steps.size() < max_len) {
            auto& c = cursor[static_cast<std::size_t>(at)];
            const auto end = g.out_begin[static_cast<std::size_t>(at) + 1];
            while (c < end && covered[c]) ++c;
            if (c == end) break;
            take(c);
            at = g.edges[c].to;
        }
        suite.cases.push_back(std::move(tc));
    }
    return suite;
}

/**
 *  Long covering walks.
 *
 *  From the current node the walk takes an uncovered out-edge if there is
 *  one, otherwise the shortest path to the nearest uncovered edge. A new
 *  case from the initial state starts only when no uncovered edge is
 *  reachable from the current node or the next segment would exceed
 *  `max_len`.
 */
inline TestSuite gen_longtests(const StateGraph& g, std::size_t max_len, std::uint64_t seed)
{
    if (max_len < 1) throw Error("invalid-argument", "max_len must be at least 1");
    TestSuite suite{g.model, "longtests", seed, {}};
    const detail::ShortestPathTree tree(g);
    detail::require_within(g, tree, max_len);

    std::vector<char> covered(g.edges.size(), 0);
    std::size_t remaining = g.edges.size();
    TestCase tc;
    std::int32_t at = StateGraph::initial;

    auto flush = [&] {
        if (tc.steps.empty()) return;
        tc.id = suite.cases.size() + 1;
        suite.cases.push_back(std::move(tc));
        tc = TestCase{};
    };

    // shortest path from `from` ending with an uncovered edge; empty if none
    auto nearest_uncovered = [&](std::int32_t from) {
        std::vector<std::size_t> via(g.nodes.size(), detail::unreached);
        std::vector<char> seen(g.nodes.size(), 0);
        std::deque<std::int32_t> queue{from};
        seen[static_cast<std::size_t>(from)] = 1;
        while (!queue.empty()) {
            const auto n = queue.front();
            queue.pop_front();
            for (const auto& e : g.out_edges(n)) {
                if (covered[g.edge_index(e)]) continue;
                std::vector<std::size_t> path{g.edge_index(e)};
                for (auto m = static_cast<std::size_t>(n); via[m] != detail::unreached;
                     m = static_cast<std::size_t>(g.edges[via[m]].from)) {
                    path.push_back(via[m]);
                }
                return std::vector<std::size_t>(path.rbegin(), path.rend());
            }
            for (const auto& e : g.out_edges(n)) {
                const auto to = static_cast<std::size_t>(e.to);
                if (seen[to]) continue;
                seen[to] = 1;
                via[to] = g.edge_index(e);
                queue.push_back(e.to);
            }
        }
        return std::vector<std::size_t>{};
    };

    while (remaining > 0) {
        auto path = nearest_uncovered(at);
        if (path.empty() || tc.steps.size() + path.size() > max_len) {
            if (tc.steps.empty()) {
                throw Error("unsatisfiable", std::to_string(remaining) + " edges cannot be covered within max_len " +
                                                 std::to_string(max_len));
            }
            // restart from the initial state, which reaches every edge within max_len
            flush();
            at = StateGraph::initial;
            continue;
        }
        for (auto idx : path) {
            if (!covered[idx]) {
                covered[idx] = 1;
                --remaining;
            }
            tc.steps.push_back(detail::make_step(g, g.edges[idx]));
        }
        at = g.edges[path.back()].to;
    }
    flush();
    return suite;
}

/// `n_cases` uniform random walks of `len` steps, cut short at dead ends.
inline TestSuite gen_random(const StateGraph& g, std::size_t n_cases, std::size_t len, std::uint64_t seed)
{
    if (n_cases < 1 || len < 1) throw Error("invalid-argument", "n_cases and len must be at least 1");
    TestSuite suite{g.model, "random", seed, {}};
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_cases && !g.nodes.empty(); ++i) {
        TestCase tc;
        std::int32_t at = StateGraph::initial;
        while (tc.steps.size() < len) {
            const auto outs = g.out_edges(at);
            if (outs.empty()) break;
            std::uniform_int_distribution<std::size_t> pick(0, outs.size() - 1);
            const auto& e = outs[pick(rng)];
            tc.steps.push_back(detail::make_step(g, e));
            at = e.to;
        }
        if (tc.steps.empty()) break;
        tc.id = suite.cases.size() + 1;
        suite.cases.push_back(std::move(tc));
    }
    return suite;
}

/// Keeps the cases that call `must_include` at least once. Ids are preserved.
inline TestSuite filter_suite(const TestSuite& suite, std::string_view must_include, std::vector<std::string>* warnings = nullptr)
{
    TestSuite out{suite.model, suite.strategy, suite.seed, {}};
    for (const auto& tc : suite.cases) {
        for (const auto& s : tc.steps) {
            if (s.stimulus.name == must_include) {
                out.cases.push_back(tc);
                break;
            }
        }
    }
    if (out.cases.empty() && warnings) {
        warnings->push_back("empty-result: no case exercises '" + std::string(must_include) + "'");
    }
    return out;
}

/**
 *  Transition coverage of `suite` over `g`.
 *
 *  Throws `illegal-replay` naming the case and 1-based step when a step has
 *  no matching edge or its expectations differ from the edge.
 */
inline CoverageReport coverage(const TestSuite& suite, const StateGraph& g)
{
    std::unordered_map<std::string, std::int32_t> label_ids;
    for (std::size_t i = 0; i < g.labels.size(); ++i) label_ids.emplace(to_string(g.labels[i]), static_cast<std::int32_t>(i));

    std::vector<char> covered(g.edges.size(), 0);
    for (const auto& tc : suite.cases) {
        std::int32_t at = StateGraph::initial;
        for (std::size_t i = 0; i < tc.steps.size(); ++i) {
            const auto& step = tc.steps[i];
            auto fail = [&](const std::string& why) {
                throw Error("illegal-replay", "case " + std::to_string(tc.id) + " step " + std::to_string(i + 1) + ": " + why);
            };
            if (g.nodes.empty()) fail("graph is empty");
            auto it = label_ids.find(to_string(step.stimulus));
            const GraphEdge* edge = nullptr;
            if (it != label_ids.end()) {
                for (const auto& e : g.out_edges(at)) {
                    if (e.label == it->second) edge = &e;
                }
            }
            if (!edge) fail("no transition for " + to_string(step.stimulus) + " in state " + g.nodes[static_cast<std::size_t>(at)]);
            const auto& x = g.expectations[static_cast<std::size_t>(edge->expectation)];
            if (x.notifications != step.expect_notify || x.reply != step.expect_reply) {
                fail("expectations differ from the model for " + to_string(step.stimulus));
            }
            covered[g.edge_index(*edge)] = 1;
            at = edge->to;
        }
    }
    CoverageReport report;
    report.transitions_total = g.edges.size();
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (covered[i]) {
            ++report.transitions_covered;
        } else {
            report.uncovered.push_back(g.edges[i]);
        }
    }
    return report;
}

} // namespace ifspec
#endif // IFSPEC_STRATEGIES_HPP
