#ifndef IFSPEC_COMPOSE_HPP
#define IFSPEC_COMPOSE_HPP

#include "ifspec/model.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace ifspec
{

struct CompositionPlan
{
    std::vector<InterfaceModel> components;
    /// Stimuli declared by two or more components, in first-declaration order.
    std::vector<std::string> sync_set;
    std::string product_name;
};

inline std::string describe_decl(const EventDecl& d)
{
    std::string out = std::string(to_string(d.kind)) + " " + d.name;
    if (!d.params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < d.params.size(); ++i) {
            if (i) out += ", ";
            out += d.params[i].name + ":" + std::string(to_string(d.params[i].sort));
        }
        out += ')';
    }
    return out;
}

/**
 *  Checks that shared event names are declared identically and computes
 *  the synchronization set. Throws `signature-mismatch`.
 */
inline CompositionPlan alphabet_report(const std::vector<InterfaceModel>& models, std::string product_name = {})
{
    if (models.size() < 2) throw Error("invalid-argument", "composition needs at least two models");
    CompositionPlan plan;
    plan.components = models;
    std::map<std::string, std::pair<const EventDecl*, const InterfaceModel*>> first;
    std::map<std::string, int> owners;
    std::vector<std::string> order;
    for (const auto& m : models) {
        for (const auto& d : m.alphabet) {
            auto [it, fresh] = first.emplace(d.name, std::make_pair(&d, &m));
            if (fresh) {
                order.push_back(d.name);
            } else if (!(*it->second.first == d)) {
                throw Error("signature-mismatch", "event '" + d.name + "' is declared as '" + describe_decl(*it->second.first) +
                                                      "' in " + it->second.second->name + " but as '" + describe_decl(d) +
                                                      "' in " + m.name);
            }
            if (d.kind == EventKind::stimulus) ++owners[d.name];
        }
    }
    for (const auto& name : order) {
        if (owners[name] >= 2) plan.sync_set.push_back(name);
    }
    if (product_name.empty()) {
        for (std::size_t i = 0; i < models.size(); ++i) {
            if (i) product_name += '_';
            product_name += models[i].name;
        }
    }
    plan.product_name = std::move(product_name);
    return plan;
}

/**
 *  Synchronous product of the plan's components.
 *
 *  Product states are all tuples of component states, named by joining the
 *  component state names with `x` (component 0 varies slowest). A stimulus
 *  owned by several components fires only when legal in all of them; its
 *  reply must agree (`reply-conflict` otherwise). Other stimuli move only
 *  their owner. Notifications concatenate in component order.
 *
 *  Throws `invalid-model` for an invalid component, `signature-mismatch`,
 *  `reply-conflict`.
 */
inline InterfaceModel compose(const CompositionPlan& plan)
{
    const auto checked = alphabet_report(plan.components, plan.product_name);
    for (const auto& c : plan.components) {
        if (!validate(c).ok) throw Error("invalid-model", "component '" + c.name + "' is not valid");
    }
    const auto& comps = plan.components;
    const std::size_t n = comps.size();

    InterfaceModel product;
    product.name = checked.product_name;
    {
        std::set<std::string> seen;
        for (const auto& c : comps) {
            for (const auto& d : c.alphabet) {
                if (seen.insert(d.name).second) product.alphabet.push_back(d);
            }
        }
    }

    std::vector<ModelIndex> indexes;
    indexes.reserve(n);
    for (const auto& c : comps) indexes.emplace_back(c);

    // radix[i]: product-index weight of component i
    std::vector<std::size_t> radix(n, 1);
    std::size_t total = 1;
    for (std::size_t i = n; i-- > 0;) {
        radix[i] = total;
        total *= comps[i].states.size();
    }

    std::unordered_set<std::string> taken;
    for (const auto& d : product.alphabet) taken.insert(d.name);
    product.states.reserve(total);
    std::vector<std::size_t> digits(n, 0);
    for (std::size_t p = 0; p < total; ++p) {
        std::string name;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) name += 'x';
            name += comps[i].states[(p / radix[i]) % comps[i].states.size()];
        }
        if (taken.count(name)) {
            std::size_t k = 2;
            while (taken.count(name + "_" + std::to_string(k))) ++k;
            name += "_" + std::to_string(k);
        }
        taken.insert(name);
        product.states.push_back(std::move(name));
    }
    {
        std::size_t p = 0;
        for (std::size_t i = 0; i < n; ++i) p += static_cast<std::size_t>(indexes[i].state_id(comps[i].initial)) * radix[i];
        product.initial = product.states[p];
    }

    struct Owner
    {
        std::size_t component;
        std::int32_t stimulus;
    };
    std::vector<std::pair<std::string, std::vector<Owner>>> stimuli;
    for (const auto& d : product.alphabet) {
        if (d.kind != EventKind::stimulus) continue;
        std::vector<Owner> owners;
        for (std::size_t i = 0; i < n; ++i) {
            const auto e = indexes[i].stimulus_id(d.name);
            if (e >= 0) owners.push_back({i, e});
        }
        stimuli.emplace_back(d.name, std::move(owners));
    }

    product.rules.reserve(total * stimuli.size());
    for (std::size_t p = 0; p < total; ++p) {
        for (std::size_t i = 0; i < n; ++i) digits[i] = (p / radix[i]) % comps[i].states.size();
        for (const auto& [stimulus, owners] : stimuli) {
            RuleCase rule{product.states[p], stimulus, std::nullopt};
            bool legal = true;
            Transition t;
            std::size_t target = p;
            for (const auto& o : owners) {
                const auto* r = indexes[o.component].rule(static_cast<std::int32_t>(digits[o.component]), o.stimulus);
                if (!r->legal()) {
                    legal = false;
                    break;
                }
                const auto& resp = *r->response;
                if (t.reply.empty()) {
                    t.reply = resp.reply;
                } else if (t.reply != resp.reply) {
                    throw Error("reply-conflict", "stimulus '" + stimulus + "' replies '" + t.reply + "' and '" + resp.reply +
                                                      "' in joint state " + product.states[p]);
                }
                t.notifications.insert(t.notifications.end(), resp.notifications.begin(), resp.notifications.end());
                const auto next = static_cast<std::size_t>(indexes[o.component].state_id(resp.target));
                target = target - digits[o.component] * radix[o.component] + next * radix[o.component];
            }
            if (legal) {
                t.target = product.states[target];
                rule.response = std::move(t);
            }
            product.rules.push_back(std::move(rule));
        }
    }
    return product;
}

inline InterfaceModel compose(const std::vector<InterfaceModel>& models, std::string product_name = {})
{
    return compose(alphabet_report(models, std::move(product_name)));
}

} // namespace ifspec
#endif // IFSPEC_COMPOSE_HPP
