// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include "support/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ifspec;

namespace
{

using clock_type = std::chrono::steady_clock;

struct Outcome
{
    bool pass = true;
    std::string detail;
};

double seconds_since(clock_type::time_point start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt_seconds(double s)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

std::string models_dir()
{
    return IFSPEC_MODELS_DIR;
}

InterfaceModel load(const std::string& name)
{
    auto r = parse_file(models_dir() + "/" + name);
    if (!r) throw Error("fixture", "cannot parse " + name);
    return std::move(*r.model);
}

GenConfig load_cfg(const std::string& name)
{
    std::ifstream in(models_dir() + "/" + name);
    return parse_gen_config(in);
}

std::vector<InterfaceModel> random_corpus(std::uint64_t seed, std::size_t n)
{
    std::mt19937_64 rng(seed);
    std::vector<InterfaceModel> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(oracle::random_model(rng, {.max_states = 8, .max_stimuli = 6, .all_reachable = (i % 4) != 0}));
    return out;
}

Outcome a1_soundness(const std::vector<InterfaceModel>& corpus)
{
    const auto start = clock_type::now();
    std::size_t cases = 0, violations = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& m = corpus[i];
        const auto g = explore(build_test_model(m), 1000);
        for (const auto& suite : {gen_shorttests(g, 20, i), gen_longtests(g, 60, i), gen_random(g, 8, 12, i)}) {
            cases += suite.cases.size();
            violations += oracle::unsound_steps(m, suite);
        }
    }
    const double t = seconds_since(start);
    return {violations == 0 && t < 60.0,
            std::to_string(corpus.size()) + " models, " + std::to_string(cases) + " cases, " + std::to_string(violations) + " violations, " +
                fmt_seconds(t)};
}

Outcome a2_coverage()
{
    const auto start = clock_type::now();
    bool ok = true;
    std::string detail;
    for (const auto& [name, model] : std::vector<std::pair<std::string, InterfaceModel>>{{"alarm", alarm_model()}, {"terminal", terminal_model()}}) {
        const auto g = explore(build_test_model(model), 10000);
        for (const auto& suite : {gen_shorttests(g, 20, 0), gen_longtests(g, 200, 0)}) {
            const auto [hit, total] = oracle::edge_coverage(model, suite);
            ok = ok && hit == total && total > 0;
            detail += name + "/" + suite.strategy + " " + std::to_string(hit) + "/" + std::to_string(total) + ", ";
        }
    }
    const double t = seconds_since(start);
    return {ok && t < 5.0, detail + fmt_seconds(t)};
}

Outcome a3_oracle_equivalence(const std::vector<InterfaceModel>& corpus)
{
    std::size_t mismatches = 0, edges = 0;
    for (const auto& m : corpus) {
        const auto g = explore(build_test_model(m), 1000);
        std::set<oracle::EdgeKey> got;
        for (const auto& e : g.edges) {
            const auto& x = g.expectations[static_cast<std::size_t>(e.expectation)];
            got.insert({g.nodes[static_cast<std::size_t>(e.from)], g.labels[static_cast<std::size_t>(e.label)].name, x.notifications, x.reply,
                        g.nodes[static_cast<std::size_t>(e.to)]});
        }
        std::set<oracle::EdgeKey> expected;
        for (const auto& t : legal_transitions(m)) expected.insert({t.state, t.stimulus, t.response.notifications, t.response.reply, t.response.target});
        edges += got.size();
        if (got != expected || got.size() != g.edges.size() || expected != oracle::legal_edges(m)) ++mismatches;
    }
    return {mismatches == 0, std::to_string(corpus.size()) + " models, " + std::to_string(edges) + " edges, " + std::to_string(mismatches) + " mismatches"};
}

Outcome a4_bug_seeding()
{
    const auto start = clock_type::now();
    bool ok = true;
    std::size_t mutants = 0, killed = 0;
    std::string survivors;
    auto endpoint = [](const std::string& fixture, const std::string& mutant) {
        std::string cmd = std::string("stdio:") + IFSPEC_CLI_PATH + " sut " + fixture + " --stdio";
        if (!mutant.empty()) cmd += " --mutant " + mutant;
        return parse_endpoint(cmd, 5000);
    };
    for (const auto& f : fixtures()) {
        const auto g = explore(build_test_model(f.model), 10000);
        const auto suite = gen_longtests(g, 200, 0);
        const auto base = run_suite(endpoint(f.name, ""), suite, 2);
        if (base.passed != suite.cases.size()) {
            ok = false;
            survivors += f.name + " correct SUT failed; ";
        }
        for (const auto& m : f.mutants) {
            ++mutants;
            const auto report = run_suite(endpoint(f.name, m.id), suite, 2);
            if (report.failed >= 1) {
                ++killed;
            } else {
                survivors += m.id + " survived; ";
            }
        }
    }
    const double t = seconds_since(start);
    ok = ok && mutants >= 8 && killed == mutants && t < 30.0;
    return {ok, std::to_string(killed) + "/" + std::to_string(mutants) + " mutants killed, correct SUTs all-pass" +
                    (survivors.empty() ? "" : " [" + survivors + "]") + ", " + fmt_seconds(t)};
}

InterfaceModel unit_like(const InterfaceModel& m)
{
    InterfaceModel u;
    u.name = "Unit";
    u.states = {"U"};
    u.initial = "U";
    for (const auto& d : m.alphabet) {
        if (d.kind == EventKind::reply) {
            u.alphabet = {d};
            break;
        }
    }
    return u;
}

Outcome a5_composition_laws()
{
    std::mt19937_64 rng(55);
    std::size_t failures = 0;
    for (int i = 0; i < 100; ++i) {
        auto a = oracle::random_model(rng, {.max_states = 5, .max_stimuli = 4, .prefix = "a"});
        auto b = oracle::random_model(rng, {.max_states = 5, .max_stimuli = 4, .prefix = "b"});
        // half the pairs share a stimulus with a common reply
        if (i % 2 == 0) {
            const auto shared = a.alphabet.front();
            b.alphabet.insert(b.alphabet.begin(), shared);
            const auto reply = std::find_if(a.alphabet.begin(), a.alphabet.end(), [](const EventDecl& d) { return d.kind == EventKind::reply; })->name;
            b.alphabet.push_back({reply, EventKind::reply, {}});
            for (auto& r : a.rules) {
                if (r.stimulus == shared.name && r.response) r.response->reply = reply;
            }
            std::bernoulli_distribution coin(0.6);
            for (const auto& s : b.states) {
                std::optional<Transition> t;
                if (coin(rng)) t = Transition{{}, reply, b.states[std::uniform_int_distribution<std::size_t>(0, b.states.size() - 1)(rng)]};
                b.rules.push_back({s, shared.name, t});
            }
        }
        try {
            const auto ab = compose({a, b});
            const auto ba = compose({b, a});
            const bool laws = validate(ab).ok && validate(ba).ok && oracle::isomorphic(ab, ba, true) &&
                              oracle::isomorphic(compose({a, unit_like(a)}), a) && oracle::isomorphic(compose({unit_like(b), b}), b);
            if (!laws) ++failures;
        } catch (const Error&) {
            ++failures;
        }
    }
    return {failures == 0, "100 pairs, " + std::to_string(failures) + " failures"};
}

Outcome a6_pairwise()
{
    const std::vector<std::size_t> sizes{3, 3, 3};
    const auto pw = pairwise_rows(sizes);
    const auto all = cartesian_rows(sizes);
    const bool pairs = oracle::covers_all_pairs(sizes, pw);

    const auto valve = load("valve.ifm");
    auto cfg = load_cfg("valve_pairwise.cfg");
    const auto tm = build_test_model(valve);
    const auto pw_actions = expand_domains(tm, resolve_domains(valve, cfg)).actions.size() - 2;
    cfg.combination = Combination::cartesian;
    const auto cart_actions = expand_domains(tm, resolve_domains(valve, cfg)).actions.size() - 2;

    const bool ok = pw.size() <= 9 && pairs && all.size() == 27 && pw_actions <= 9 && cart_actions == 27;
    return {ok, "pairwise " + std::to_string(pw.size()) + " rows (" + std::to_string(pw_actions) + " ground actions), all pairs " +
                    (pairs ? "covered" : "NOT covered") + ", cartesian " + std::to_string(all.size()) + " (" + std::to_string(cart_actions) +
                    " ground actions)"};
}

/// Equal up to the order of rules, which the text format groups by state.
bool same_structure(InterfaceModel a, InterfaceModel b)
{
    auto key = [](const RuleCase& r) { return std::make_pair(r.state, r.stimulus); };
    auto by_cell = [&](const RuleCase& x, const RuleCase& y) { return key(x) < key(y); };
    std::sort(a.rules.begin(), a.rules.end(), by_cell);
    std::sort(b.rules.begin(), b.rules.end(), by_cell);
    return a == b;
}

Outcome a7_round_trips()
{
    std::mt19937_64 rng(77);
    std::size_t bad_models = 0;
    for (int i = 0; i < 500; ++i) {
        const auto m = oracle::random_model(rng, {.params = true, .all_reachable = (i % 3) != 0});
        const auto back = parse(serialize(m));
        if (!back || !same_structure(m, *back.model)) ++bad_models;
    }

    struct Case
    {
        std::string label;
        InterfaceModel model;
        GenConfig cfg;
    };
    std::vector<Case> cases;
    for (const auto& [file, cfgs] : std::vector<std::pair<std::string, std::vector<std::string>>>{
             {"alarm.ifm", {"shorttests.cfg", "longtests.cfg", "random.cfg"}},
             {"terminal.ifm", {"shorttests.cfg", "longtests.cfg", "random.cfg"}},
             {"truck.ifm", {"shorttests.cfg", "random.cfg"}},
             {"unit.ifm", {"shorttests.cfg"}},
             {"valve.ifm", {"valve_pairwise.cfg"}}}) {
        for (const auto& c : cfgs) cases.push_back({file + "+" + c, load(file), load_cfg(c)});
    }
    std::size_t bad_runs = 0;
    std::string which;
    for (const auto& c : cases) {
        const auto gen = generate(c.model, c.cfg);
        const auto text = suite_to_string(gen.suite, gen.coverage);
        const auto loaded = suite_from_string(text);
        TcpSutServer server(c.model, std::nullopt);
        server.start();
        const auto report = run_suite(parse_endpoint("127.0.0.1:" + std::to_string(server.port()), 5000), loaded.suite, 2);
        if (!(loaded.suite == gen.suite) || !loaded.coverage || report.passed != loaded.suite.cases.size()) {
            ++bad_runs;
            which += " " + c.label;
        }
    }
    return {bad_models == 0 && bad_runs == 0, "500 models, " + std::to_string(bad_models) + " round-trip mismatches; " +
                                                  std::to_string(cases.size()) + " gen->run closures, " + std::to_string(bad_runs) + " broken" + which};
}

Outcome a8_scale()
{
    const auto compose_start = clock_type::now();
    const auto product = compose({oracle::ring_model("a", 46), oracle::ring_model("b", 46), oracle::ring_model("c", 46)});
    const double compose_t = seconds_since(compose_start);

    const auto start = clock_type::now();
    const auto g = explore(build_test_model(product), 1'000'000);
    const auto suite = gen_shorttests(g, 200, 0);
    const double t = seconds_since(start);
    const auto cov = coverage(suite, g);
    const bool ok = g.nodes.size() >= 90'000 && cov.transitions_covered == cov.transitions_total && t < 10.0;
    return {ok, std::to_string(g.nodes.size()) + " states, " + std::to_string(g.edges.size()) + " edges, " + std::to_string(suite.cases.size()) +
                    " cases, explore+shorttests " + fmt_seconds(t) + " (compose " + fmt_seconds(compose_t) + ")"};
}

} // namespace

int main()
{
    bool all = true;
    auto report = [&](const std::string& id, const std::string& title, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << title << ": " << o.detail << std::endl;
    };

    const auto corpus = random_corpus(2024, 500);
    report("A1", "soundness", [&] { return a1_soundness(corpus); });
    report("A2", "coverage", a2_coverage);
    report("A3", "oracle equivalence", [&] { return a3_oracle_equivalence(corpus); });
    report("A4", "bug seeding", a4_bug_seeding);
    report("A5", "composition laws", a5_composition_laws);
    report("A6", "pairwise combination", a6_pairwise);
    report("A7", "round-trips", a7_round_trips);
    report("A8", "scale", a8_scale);
    return all ? 0 : 1;
}
