#ifndef IFSPEC_PIPELINE_HPP
#define IFSPEC_PIPELINE_HPP

#include "ifspec/strategies.hpp"
#include "ifspec/suite_io.hpp"
#include "ifspec/testgen.hpp"

#include <string>
#include <vector>

namespace ifspec
{

struct Generated
{
    TestSuite suite;
    CoverageNote coverage;
    std::vector<std::string> warnings;
};

/**
 *  Model + generation settings -> suite with its coverage note.
 *
 *  Throws `invalid-model`, `config`, `missing-domain`, `state-budget-exceeded`,
 *  `unsatisfiable`.
 */
inline Generated generate(const InterfaceModel& model, const GenConfig& cfg)
{
    const auto tm = expand_domains(build_test_model(model), resolve_domains(model, cfg));
    const auto graph = explore(tm, cfg.max_states);
    Generated out;
    if (cfg.strategy == "shorttests") {
        out.suite = gen_shorttests(graph, cfg.max_len, cfg.seed);
    } else if (cfg.strategy == "longtests") {
        out.suite = gen_longtests(graph, cfg.max_len, cfg.seed);
    } else if (cfg.strategy == "random") {
        out.suite = gen_random(graph, cfg.n_cases, cfg.max_len, cfg.seed);
    } else {
        throw Error("config", "unknown strategy '" + cfg.strategy + "'");
    }
    if (cfg.must_include) out.suite = filter_suite(out.suite, *cfg.must_include, &out.warnings);
    const auto cov = coverage(out.suite, graph);
    out.coverage = {cov.transitions_covered, cov.transitions_total};
    return out;
}

} // namespace ifspec
#endif // IFSPEC_PIPELINE_HPP
