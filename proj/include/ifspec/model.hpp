#ifndef IFSPEC_MODEL_HPP
#define IFSPEC_MODEL_HPP

#include "ifspec/error.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ifspec
{

enum class EventKind
{
    stimulus,
    notification,
    reply
};

enum class Sort
{
    integer,
    string
};

inline std::string_view to_string(EventKind kind)
{
    switch (kind) {
        case EventKind::stimulus: return "in";
        case EventKind::notification: return "out";
        case EventKind::reply: return "reply";
    }
    return "?";
}

inline std::string_view to_string(Sort sort)
{
    return sort == Sort::integer ? "int" : "string";
}

struct Param
{
    std::string name;
    Sort sort = Sort::integer;

    bool operator==(const Param&) const = default;
};

struct EventDecl
{
    std::string name;
    EventKind kind = EventKind::stimulus;
    std::vector<Param> params;

    bool operator==(const EventDecl&) const = default;
};

/// Response of a legal table cell.
struct Transition
{
    std::vector<std::string> notifications;
    std::string reply;
    std::string target;

    bool operator==(const Transition&) const = default;
};

/// One cell of the rule table. An empty `response` marks the stimulus illegal.
struct RuleCase
{
    std::string state;
    std::string stimulus;
    std::optional<Transition> response;

    bool legal() const { return response.has_value(); }
    bool operator==(const RuleCase&) const = default;
};

/// Result of handling one stimulus: the taken transition, or nullopt when illegal.
using StepOutcome = std::optional<Transition>;

struct InterfaceModel
{
    std::string name;
    std::vector<EventDecl> alphabet;
    std::vector<std::string> states;
    std::string initial;
    std::vector<RuleCase> rules;

    bool operator==(const InterfaceModel&) const = default;

    const EventDecl* find_event(std::string_view event) const
    {
        auto it = std::find_if(alphabet.begin(), alphabet.end(),
                               [&](const EventDecl& d) { return d.name == event; });
        return it == alphabet.end() ? nullptr : &*it;
    }

    bool has_state(std::string_view state) const
    {
        return std::find(states.begin(), states.end(), state) != states.end();
    }

    /// Stimulus declarations in alphabet order.
    std::vector<const EventDecl*> stimuli() const
    {
        std::vector<const EventDecl*> out;
        for (const auto& d : alphabet) {
            if (d.kind == EventKind::stimulus) out.push_back(&d);
        }
        return out;
    }
};

enum class Severity
{
    error,
    warning
};

inline std::string_view to_string(Severity s)
{
    return s == Severity::error ? "error" : "warning";
}

struct Finding
{
    Severity severity = Severity::error;
    std::string code;
    std::string location;
    std::string message;
};

struct ValidationReport
{
    bool ok = true;
    std::vector<Finding> findings;

    bool has(std::string_view code) const
    {
        return std::any_of(findings.begin(), findings.end(),
                           [&](const Finding& f) { return f.code == code; });
    }
};

/**
 *  Dense (state, stimulus) -> rule lookup over an interface model.
 *
 *  Only resolvable rules are indexed; the first rule wins for duplicated
 *  cells. Missing cells map to -1. Holds a reference to the model, which
 *  must outlive the index.
 */
class ModelIndex
{
public:
    explicit ModelIndex(const InterfaceModel& model)
        : model_(&model)
    {
        state_ids_.reserve(model.states.size());
        for (std::size_t i = 0; i < model.states.size(); ++i) {
            state_ids_.emplace(model.states[i], static_cast<std::int32_t>(i));
        }
        for (const auto& d : model.alphabet) {
            if (d.kind == EventKind::stimulus && !stimulus_ids_.count(d.name)) {
                stimulus_ids_.emplace(d.name, static_cast<std::int32_t>(stimuli_.size()));
                stimuli_.push_back(d.name);
            }
        }
        cells_.assign(model.states.size() * stimuli_.size(), -1);
        for (std::size_t r = 0; r < model.rules.size(); ++r) {
            const auto& rule = model.rules[r];
            const auto s = state_id(rule.state);
            const auto e = stimulus_id(rule.stimulus);
            if (s < 0 || e < 0) continue;
            auto& cell = cells_[cell_offset(s, e)];
            if (cell < 0) cell = static_cast<std::int32_t>(r);
        }
    }

    std::int32_t state_id(std::string_view state) const
    {
        auto it = state_ids_.find(std::string(state));
        return it == state_ids_.end() ? -1 : it->second;
    }

    std::int32_t stimulus_id(std::string_view stimulus) const
    {
        auto it = stimulus_ids_.find(std::string(stimulus));
        return it == stimulus_ids_.end() ? -1 : it->second;
    }

    std::size_t state_count() const { return model_->states.size(); }
    const std::vector<std::string>& stimuli() const { return stimuli_; }

    /// Rule for the cell, or nullptr when the table has no entry.
    const RuleCase* rule(std::int32_t state, std::int32_t stimulus) const
    {
        const auto r = cells_[cell_offset(state, stimulus)];
        return r < 0 ? nullptr : &model_->rules[static_cast<std::size_t>(r)];
    }

    const InterfaceModel& model() const { return *model_; }

private:
    std::size_t cell_offset(std::int32_t s, std::int32_t e) const
    {
        return static_cast<std::size_t>(s) * stimuli_.size() + static_cast<std::size_t>(e);
    }

    const InterfaceModel* model_;
    std::unordered_map<std::string, std::int32_t> state_ids_;
    std::unordered_map<std::string, std::int32_t> stimulus_ids_;
    std::vector<std::string> stimuli_;
    std::vector<std::int32_t> cells_;
};

inline std::string cell_location(std::string_view state, std::string_view stimulus)
{
    std::string loc(state);
    loc += '.';
    loc += stimulus;
    return loc;
}

namespace detail
{

inline std::vector<std::int32_t> reachable_ids(const ModelIndex& index, std::int32_t initial)
{
    std::vector<char> seen(index.state_count(), 0);
    std::vector<std::int32_t> order;
    if (initial < 0) return order;
    std::deque<std::int32_t> queue{initial};
    seen[static_cast<std::size_t>(initial)] = 1;
    const auto n_stimuli = static_cast<std::int32_t>(index.stimuli().size());
    while (!queue.empty()) {
        const auto s = queue.front();
        queue.pop_front();
        order.push_back(s);
        for (std::int32_t e = 0; e < n_stimuli; ++e) {
            const auto* rule = index.rule(s, e);
            if (!rule || !rule->legal()) continue;
            const auto t = index.state_id(rule->response->target);
            if (t >= 0 && !seen[static_cast<std::size_t>(t)]) {
                seen[static_cast<std::size_t>(t)] = 1;
                queue.push_back(t);
            }
        }
    }
    return order;
}

} // namespace detail

/**
 *  Checks completeness, determinism, name resolution and reachability.
 *
 *  Errors: `duplicate-declaration`, `name-clash`, `invalid-params`,
 *  `unresolved`, `nondeterministic`, `incomplete`. Warnings: `unreachable`.
 */
inline ValidationReport validate(const InterfaceModel& model)
{
    ValidationReport report;
    auto add = [&](Severity sev, std::string code, std::string loc, std::string msg) {
        if (sev == Severity::error) report.ok = false;
        report.findings.push_back({sev, std::move(code), std::move(loc), std::move(msg)});
    };

    std::set<std::string> event_names;
    for (const auto& d : model.alphabet) {
        if (!event_names.insert(d.name).second) {
            add(Severity::error, "duplicate-declaration", d.name, "event '" + d.name + "' declared more than once");
        }
        if (d.kind != EventKind::stimulus && !d.params.empty()) {
            add(Severity::error, "invalid-params", d.name,
                std::string(to_string(d.kind)) + " event '" + d.name + "' cannot carry parameters");
        }
        std::set<std::string> param_names;
        for (const auto& p : d.params) {
            if (!param_names.insert(p.name).second) {
                add(Severity::error, "duplicate-declaration", d.name + "." + p.name,
                    "parameter '" + p.name + "' declared more than once");
            }
        }
    }
    std::set<std::string> state_names;
    for (const auto& s : model.states) {
        if (!state_names.insert(s).second) {
            add(Severity::error, "duplicate-declaration", s, "state '" + s + "' declared more than once");
        }
        if (event_names.count(s)) {
            add(Severity::error, "name-clash", s, "'" + s + "' is both a state and an event");
        }
    }
    if (model.states.empty()) {
        add(Severity::error, "unresolved", model.name, "model declares no states");
    }
    if (!state_names.count(model.initial)) {
        add(Severity::error, "unresolved", model.initial, "initial state '" + model.initial + "' is not declared");
    }

    auto event_kind_is = [&](const std::string& name, EventKind kind) {
        const auto* d = model.find_event(name);
        return d && d->kind == kind;
    };
    for (const auto& rule : model.rules) {
        const auto loc = cell_location(rule.state, rule.stimulus);
        if (!state_names.count(rule.state)) {
            add(Severity::error, "unresolved", loc, "rule refers to undeclared state '" + rule.state + "'");
        }
        if (!event_kind_is(rule.stimulus, EventKind::stimulus)) {
            add(Severity::error, "unresolved", loc, "rule refers to undeclared stimulus '" + rule.stimulus + "'");
        }
        if (!rule.response) continue;
        for (const auto& n : rule.response->notifications) {
            if (!event_kind_is(n, EventKind::notification)) {
                add(Severity::error, "unresolved", loc, "undeclared notification '" + n + "'");
            }
        }
        if (!event_kind_is(rule.response->reply, EventKind::reply)) {
            add(Severity::error, "unresolved", loc, "undeclared reply '" + rule.response->reply + "'");
        }
        if (!state_names.count(rule.response->target)) {
            add(Severity::error, "unresolved", loc, "undeclared target state '" + rule.response->target + "'");
        }
    }

    const ModelIndex index(model);
    const auto& stimuli = index.stimuli();
    std::vector<int> counts(index.state_count() * stimuli.size(), 0);
    for (const auto& rule : model.rules) {
        const auto s = index.state_id(rule.state);
        const auto e = index.stimulus_id(rule.stimulus);
        if (s < 0 || e < 0) continue;
        if (++counts[static_cast<std::size_t>(s) * stimuli.size() + static_cast<std::size_t>(e)] == 2) {
            add(Severity::error, "nondeterministic", cell_location(rule.state, rule.stimulus),
                "more than one rule for this state and stimulus");
        }
    }
    for (std::size_t s = 0; s < index.state_count(); ++s) {
        // duplicated state names are reported above and map to one index
        if (index.state_id(model.states[s]) != static_cast<std::int32_t>(s)) continue;
        for (std::size_t e = 0; e < stimuli.size(); ++e) {
            if (counts[s * stimuli.size() + e] == 0) {
                add(Severity::error, "incomplete", cell_location(model.states[s], stimuli[e]),
                    "no rule for stimulus '" + stimuli[e] + "' in state '" + model.states[s] + "'");
            }
        }
    }

    const auto initial = index.state_id(model.initial);
    if (initial >= 0) {
        std::vector<char> seen(index.state_count(), 0);
        for (auto s : detail::reachable_ids(index, initial)) seen[static_cast<std::size_t>(s)] = 1;
        for (std::size_t s = 0; s < index.state_count(); ++s) {
            if (!seen[s] && index.state_id(model.states[s]) == static_cast<std::int32_t>(s)) {
                add(Severity::warning, "unreachable", model.states[s],
                    "state '" + model.states[s] + "' is unreachable from '" + model.initial + "'");
            }
        }
    }
    return report;
}

/// Applies one stimulus. Throws `unknown-state` / `unknown-event`.
inline StepOutcome step(const InterfaceModel& model, std::string_view state, std::string_view stimulus)
{
    if (!model.has_state(state)) {
        throw Error("unknown-state", "unknown state '" + std::string(state) + "'");
    }
    const auto* decl = model.find_event(stimulus);
    if (!decl || decl->kind != EventKind::stimulus) {
        throw Error("unknown-event", "unknown stimulus '" + std::string(stimulus) + "'");
    }
    for (const auto& rule : model.rules) {
        if (rule.state == state && rule.stimulus == stimulus) return rule.response;
    }
    throw Error("unknown-event", "no rule for '" + std::string(stimulus) + "' in state '" + std::string(state) + "'");
}

/// States reachable from the initial state, in declaration order.
inline std::vector<std::string> reachable(const InterfaceModel& model)
{
    const ModelIndex index(model);
    std::vector<char> seen(index.state_count(), 0);
    for (auto s : detail::reachable_ids(index, index.state_id(model.initial))) {
        seen[static_cast<std::size_t>(s)] = 1;
    }
    std::vector<std::string> out;
    for (std::size_t s = 0; s < model.states.size(); ++s) {
        if (seen[s]) out.push_back(model.states[s]);
    }
    return out;
}

struct LegalTransition
{
    std::string state;
    std::string stimulus;
    Transition response;

    bool operator==(const LegalTransition&) const = default;
};

/// Every legal cell of a reachable state, ordered by state then stimulus.
inline std::vector<LegalTransition> legal_transitions(const InterfaceModel& model)
{
    const ModelIndex index(model);
    std::vector<char> seen(index.state_count(), 0);
    for (auto s : detail::reachable_ids(index, index.state_id(model.initial))) {
        seen[static_cast<std::size_t>(s)] = 1;
    }
    std::vector<LegalTransition> out;
    const auto n_stimuli = static_cast<std::int32_t>(index.stimuli().size());
    for (std::size_t s = 0; s < model.states.size(); ++s) {
        if (!seen[s]) continue;
        for (std::int32_t e = 0; e < n_stimuli; ++e) {
            const auto* rule = index.rule(static_cast<std::int32_t>(s), e);
            if (rule && rule->legal()) out.push_back({model.states[s], rule->stimulus, *rule->response});
        }
    }
    return out;
}

} // namespace ifspec
#endif // IFSPEC_MODEL_HPP
