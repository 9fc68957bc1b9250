#ifndef IFSPEC_TESTGEN_HPP
#define IFSPEC_TESTGEN_HPP

#include "ifspec/ground.hpp"
#include "ifspec/model.hpp"
#include "ifspec/pairwise.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ifspec
{

/// Observations expected for one stimulus.
struct Expectation
{
    std::vector<std::string> notifications;
    std::string reply;

    bool operator==(const Expectation&) const = default;
    auto operator<=>(const Expectation&) const = default;
};

/// Effect of an action in one state. `next < 0` means the action is disabled.
struct ActionCell
{
    std::int32_t next = -1;
    std::int32_t expectation = -1;

    bool enabled() const { return next >= 0; }
};

/**
 *  Guarded action of the explicit-state test model.
 *
 *  `label.args` is empty until the action is grounded by `expand_domains`.
 *  Ground actions expanded from one stimulus share the same cell table.
 */
struct TestAction
{
    GroundStimulus label;
    std::vector<Param> params;
    std::shared_ptr<const std::vector<ActionCell>> cells;

    bool ground() const { return label.args.size() == params.size(); }
    const ActionCell& cell(std::int32_t state) const { return (*cells)[static_cast<std::size_t>(state)]; }
};

/// Explicit-state machine: one state variable over `states`, one action per ground stimulus.
struct TestModel
{
    std::string source;
    std::vector<std::string> states;
    std::int32_t initial = 0;
    std::vector<Expectation> expectations;
    std::vector<TestAction> actions;
};

/// Builds the test model. Throws `invalid-model` unless `validate(model).ok`.
inline TestModel build_test_model(const InterfaceModel& model)
{
    const auto report = validate(model);
    if (!report.ok) {
        std::string first;
        for (const auto& f : report.findings) {
            if (f.severity == Severity::error) {
                first = f.code + " " + f.location + ": " + f.message;
                break;
            }
        }
        throw Error("invalid-model", "model '" + model.name + "' is not valid: " + first);
    }
    const ModelIndex index(model);
    TestModel tm;
    tm.source = model.name;
    tm.states = model.states;
    tm.initial = index.state_id(model.initial);

    std::map<Expectation, std::int32_t> interned;
    auto intern = [&](const Transition& t) {
        Expectation e{t.notifications, t.reply};
        auto [it, fresh] = interned.emplace(e, static_cast<std::int32_t>(tm.expectations.size()));
        if (fresh) tm.expectations.push_back(std::move(e));
        return it->second;
    };

    const auto n_states = static_cast<std::int32_t>(model.states.size());
    for (const auto* decl : model.stimuli()) {
        const auto e = index.stimulus_id(decl->name);
        auto cells = std::make_shared<std::vector<ActionCell>>(model.states.size());
        for (std::int32_t s = 0; s < n_states; ++s) {
            const auto* rule = index.rule(s, e);
            if (rule->legal()) {
                (*cells)[static_cast<std::size_t>(s)] = {index.state_id(rule->response->target), intern(*rule->response)};
            }
        }
        tm.actions.push_back({GroundStimulus{decl->name, {}}, decl->params, std::move(cells)});
    }
    return tm;
}

enum class Combination
{
    cartesian,
    pairwise
};

/// Finite value lists per (stimulus, parameter).
struct DomainSpec
{
    std::map<std::pair<std::string, std::string>, std::vector<Value>> assignments;
    Combination combination = Combination::cartesian;
};

/**
 *  Replaces each parameterized action with its ground instances.
 *
 *  Throws `missing-domain`, `empty-domain`, or `domain-type` (a value of
 *  the wrong sort).
 */
inline TestModel expand_domains(const TestModel& tm, const DomainSpec& domains)
{
    TestModel out = tm;
    out.actions.clear();
    for (const auto& action : tm.actions) {
        if (action.params.empty() || action.ground()) {
            out.actions.push_back(action);
            continue;
        }
        std::vector<const std::vector<Value>*> lists;
        std::vector<std::size_t> sizes;
        for (const auto& p : action.params) {
            auto it = domains.assignments.find({action.label.name, p.name});
            if (it == domains.assignments.end()) {
                throw Error("missing-domain", "no values for " + action.label.name + "." + p.name);
            }
            if (it->second.empty()) {
                throw Error("empty-domain", "empty value list for " + action.label.name + "." + p.name);
            }
            for (const auto& v : it->second) {
                if (!value_has_sort(v, p.sort)) {
                    throw Error("domain-type", "value " + format_value(v) + " for " + action.label.name + "." + p.name +
                                                   " is not of sort " + std::string(to_string(p.sort)));
                }
            }
            lists.push_back(&it->second);
            sizes.push_back(it->second.size());
        }
        const auto rows = domains.combination == Combination::pairwise ? pairwise_rows(sizes) : cartesian_rows(sizes);
        for (const auto& row : rows) {
            TestAction ground = action;
            for (std::size_t i = 0; i < row.size(); ++i) ground.label.args.push_back((*lists[i])[row[i]]);
            out.actions.push_back(std::move(ground));
        }
    }
    return out;
}

struct GraphEdge
{
    std::int32_t from = 0;
    std::int32_t to = 0;
    std::int32_t label = 0;
    std::int32_t expectation = 0;

    bool operator==(const GraphEdge&) const = default;
};

/**
 *  Explored transition graph. Node 0 is the initial state; edges are
 *  sorted by source node, so the out-edges of node `n` are the range
 *  `[out_begin[n], out_begin[n + 1])`.
 */
struct StateGraph
{
    std::string model;
    std::vector<std::string> nodes;
    std::vector<GroundStimulus> labels;
    std::vector<Expectation> expectations;
    std::vector<GraphEdge> edges;
    std::vector<std::size_t> out_begin;

    static constexpr std::int32_t initial = 0;

    std::span<const GraphEdge> out_edges(std::int32_t node) const
    {
        const auto n = static_cast<std::size_t>(node);
        return std::span<const GraphEdge>(edges).subspan(out_begin[n], out_begin[n + 1] - out_begin[n]);
    }

    std::size_t edge_index(const GraphEdge& e) const { return static_cast<std::size_t>(&e - edges.data()); }
};

/// Fills `out_begin` from `edges`, which must already be sorted by source.
inline void index_edges(StateGraph& g)
{
    g.out_begin.assign(g.nodes.size() + 1, 0);
    for (const auto& e : g.edges) ++g.out_begin[static_cast<std::size_t>(e.from) + 1];
    for (std::size_t i = 1; i < g.out_begin.size(); ++i) g.out_begin[i] += g.out_begin[i - 1];
}

/**
 *  Breadth-first exploration from the initial state over enabled ground
 *  actions. Nodes are numbered in discovery order; each node's edges follow
 *  action order. Throws `state-budget-exceeded` when more than `max_states`
 *  nodes are reachable, `missing-domain` for an ungrounded enabled action.
 */
inline StateGraph explore(const TestModel& tm, std::size_t max_states)
{
    if (max_states < 1) throw Error("invalid-argument", "max_states must be at least 1");
    StateGraph g;
    g.model = tm.source;
    g.expectations = tm.expectations;
    for (const auto& a : tm.actions) g.labels.push_back(a.label);

    std::vector<std::int32_t> node_of(tm.states.size(), -1);
    std::vector<std::int32_t> state_of;
    auto visit = [&](std::int32_t state) {
        auto& slot = node_of[static_cast<std::size_t>(state)];
        if (slot < 0) {
            if (state_of.size() >= max_states) {
                throw Error("state-budget-exceeded", "more than " + std::to_string(max_states) +
                                                         " states reachable in '" + tm.source + "'");
            }
            slot = static_cast<std::int32_t>(state_of.size());
            state_of.push_back(state);
            g.nodes.push_back(tm.states[static_cast<std::size_t>(state)]);
        }
        return slot;
    };

    visit(tm.initial);
    const auto n_actions = static_cast<std::int32_t>(tm.actions.size());
    for (std::size_t head = 0; head < state_of.size(); ++head) {
        const auto state = state_of[head];
        for (std::int32_t a = 0; a < n_actions; ++a) {
            const auto& action = tm.actions[static_cast<std::size_t>(a)];
            const auto& cell = action.cell(state);
            if (!cell.enabled()) continue;
            if (!action.ground()) {
                throw Error("missing-domain", "action '" + action.label.name + "' has parameters without values");
            }
            const auto to = visit(cell.next);
            g.edges.push_back({static_cast<std::int32_t>(head), to, a, cell.expectation});
        }
    }
    index_edges(g);
    return g;
}

} // namespace ifspec
#endif // IFSPEC_TESTGEN_HPP
