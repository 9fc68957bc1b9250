// ifspec: validate, visualize, generate, compose, run, serve.
//
// Exit codes: 0 success, 1 verification or test failure, 2 usage or input error.

#include "ifspec/ifspec.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

using namespace ifspec;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_input = 2;

struct Globals
{
    bool quiet = false;
    std::optional<std::uint64_t> seed;
};

/// Thrown for input errors already reported to stderr.
struct InputError
{
};

void report_error(const Error& e)
{
    std::cerr << "error " << e.code() << ": " << e.what() << '\n';
}

InterfaceModel load_model(const std::string& path)
{
    ParseResult parsed;
    try {
        parsed = parse_file(path);
    } catch (const Error& e) {
        report_error(e);
        throw InputError{};
    }
    if (!parsed) {
        for (const auto& err : parsed.errors) std::cerr << format_parse_error(path, err) << '\n';
        throw InputError{};
    }
    return std::move(*parsed.model);
}

void print_findings(const ValidationReport& report, std::ostream& out)
{
    for (const auto& f : report.findings) out << to_string(f.severity) << ' ' << f.code << ' ' << f.location << ": " << f.message << '\n';
}

/// Loads and validates; invalid models are input errors.
InterfaceModel load_valid_model(const std::string& path)
{
    auto model = load_model(path);
    const auto report = validate(model);
    if (!report.ok) {
        print_findings(report, std::cerr);
        std::cerr << path << ": model is not valid\n";
        throw InputError{};
    }
    return model;
}

bool write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        std::cerr << "error io: cannot write " << path << '\n';
        return false;
    }
    return true;
}

int cmd_validate(const Globals& g, const std::string& path)
{
    const auto model = load_model(path);
    const auto report = validate(model);
    print_findings(report, std::cout);
    if (!g.quiet && report.ok) std::cout << path << ": ok\n";
    return report.ok ? exit_ok : exit_failed;
}

int cmd_dot(const std::string& path, bool illegal)
{
    std::cout << render_dot(load_valid_model(path), illegal);
    return exit_ok;
}

int cmd_gen(const Globals& g, const std::string& model_path, const std::string& cfg_path, const std::string& out_path)
{
    const auto model = load_valid_model(model_path);
    GenConfig cfg;
    {
        std::ifstream in(cfg_path);
        if (!in) {
            std::cerr << "error io: cannot open " << cfg_path << '\n';
            return exit_input;
        }
        try {
            cfg = parse_gen_config(in);
        } catch (const Error& e) {
            std::cerr << cfg_path << ": ";
            report_error(e);
            return exit_input;
        }
    }
    if (g.seed) cfg.seed = *g.seed;

    Generated gen;
    try {
        gen = generate(model, cfg);
    } catch (const Error& e) {
        report_error(e);
        const bool failure = e.code() == "unsatisfiable" || e.code() == "state-budget-exceeded";
        return failure ? exit_failed : exit_input;
    }
    for (const auto& w : gen.warnings) std::cerr << "warning " << w << '\n';
    if (!write_text(out_path, suite_to_string(gen.suite, gen.coverage))) return exit_input;
    if (!g.quiet) {
        const double pct = gen.coverage.total == 0 ? 100.0 : 100.0 * static_cast<double>(gen.coverage.covered) / static_cast<double>(gen.coverage.total);
        std::cout << gen.suite.cases.size() << " cases, coverage " << gen.coverage.covered << '/' << gen.coverage.total << ' '
                  << format_percent(pct) << "%\n";
    }
    return exit_ok;
}

int cmd_compose(const Globals& g, const std::vector<std::string>& paths, const std::string& out_path, const std::string& name)
{
    std::vector<InterfaceModel> models;
    for (const auto& p : paths) models.push_back(load_valid_model(p));
    InterfaceModel product;
    try {
        const auto plan = alphabet_report(models, name);
        product = compose(plan);
        if (!g.quiet) {
            std::cout << "sync:";
            for (const auto& s : plan.sync_set) std::cout << ' ' << s;
            std::cout << '\n';
        }
    } catch (const Error& e) {
        report_error(e);
        return exit_input;
    }
    if (!write_text(out_path, serialize(product))) return exit_input;
    if (!g.quiet) std::cout << product.name << ": " << product.states.size() << " states, " << reachable(product).size() << " reachable\n";
    return exit_ok;
}

int cmd_run(const Globals& g, const std::string& suite_path, const std::string& endpoint_text, std::size_t parallel,
            const std::string& report_path, int timeout_ms)
{
    LoadedSuite loaded;
    {
        std::ifstream in(suite_path);
        if (!in) {
            std::cerr << "error io: cannot open " << suite_path << '\n';
            return exit_input;
        }
        try {
            loaded = read_suite(in);
        } catch (const Error& e) {
            std::cerr << suite_path << ": ";
            report_error(e);
            return exit_input;
        }
    }
    SuiteReport report;
    try {
        report = run_suite(parse_endpoint(endpoint_text, timeout_ms), loaded.suite, parallel);
    } catch (const Error& e) {
        report_error(e);
        return exit_input;
    }
    report.coverage = loaded.coverage;
    const auto text = format_report(loaded.suite, report);
    if (!report_path.empty() && !write_text(report_path, text)) return exit_input;
    if (!g.quiet) std::cout << text.substr(0, text.find("\n[report]"));
    return report.failed == 0 && report.inconclusive == 0 ? exit_ok : exit_failed;
}

volatile std::sig_atomic_t stop_requested = 0;

extern "C" void on_stop_signal(int)
{
    stop_requested = 1;
}

int cmd_sut(const Globals& g, const std::string& target, std::optional<int> listen, const std::string& host, const std::string& mutant_text,
            bool list)
{
    InterfaceModel model;
    std::vector<MutantSpec> catalog;
    if (auto f = find_fixture(target)) {
        model = std::move(f->model);
        catalog = std::move(f->mutants);
    } else {
        model = load_valid_model(target);
    }
    if (list) {
        for (const auto& m : catalog) std::cout << m.id << ' ' << to_string(m.fault) << ' ' << cell_location(m.state, m.stimulus) << '\n';
        return exit_ok;
    }
    std::optional<MutantSpec> mutant;
    if (!mutant_text.empty()) {
        try {
            mutant = resolve_mutant(catalog, mutant_text);
            (void)apply_mutant(model, *mutant);
        } catch (const Error& e) {
            report_error(e);
            return exit_input;
        }
    }
    if (!listen) {
        serve_stdio(std::move(model), mutant);
        return exit_ok;
    }
    if (*listen < 0 || *listen > 65535) {
        std::cerr << "error usage: port out of range\n";
        return exit_input;
    }
    try {
        TcpSutServer server(std::move(model), mutant, host, static_cast<std::uint16_t>(*listen));
        std::signal(SIGINT, on_stop_signal);
        std::signal(SIGTERM, on_stop_signal);
        server.start();
        if (!g.quiet) std::cout << "listening on " << host << ':' << server.port() << std::endl;
        while (!stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
    } catch (const Error& e) {
        report_error(e);
        return exit_input;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interface model validation, test generation and execution"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals globals;
    app.add_flag("-q,--quiet", globals.quiet, "Only print errors and requested output");
    app.add_option("--seed", globals.seed, "Override the generation seed");

    std::string model_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a model for completeness and consistency");
    validate_cmd->add_option("model", model_path, "Model file")->required();

    bool illegal = false;
    auto* dot_cmd = app.add_subcommand("dot", "Print the state diagram in DOT");
    dot_cmd->add_option("model", model_path, "Model file")->required();
    dot_cmd->add_flag("--illegal", illegal, "Draw illegal cells as edges to a sink");

    std::string cfg_path, out_path;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a test suite");
    gen_cmd->add_option("model", model_path, "Model file")->required();
    gen_cmd->add_option("config", cfg_path, "Generation config")->required();
    gen_cmd->add_option("-o,--out", out_path, "Suite file to write")->required();

    std::vector<std::string> compose_paths;
    std::string product_name;
    auto* compose_cmd = app.add_subcommand("compose", "Compose models into their synchronous product");
    compose_cmd->add_option("models", compose_paths, "Model files")->required()->expected(2, -1);
    compose_cmd->add_option("-o,--out", out_path, "Product model file to write")->required();
    compose_cmd->add_option("--name", product_name, "Product interface name");

    std::string suite_path, endpoint, report_path;
    std::size_t parallel = 1;
    int timeout_ms = 5000;
    auto* run_cmd = app.add_subcommand("run", "Execute a suite against a system under test");
    run_cmd->add_option("suite", suite_path, "Suite file")->required();
    run_cmd->add_option("-e,--endpoint", endpoint, "host:port, tcp:host:port or stdio:command args")->required();
    run_cmd->add_option("-j,--parallel", parallel, "Concurrent connections")->check(CLI::PositiveNumber);
    run_cmd->add_option("--report", report_path, "Write the full report here");
    run_cmd->add_option("--timeout", timeout_ms, "Per-answer timeout in ms")->check(CLI::PositiveNumber);

    std::string target, mutant, host = "127.0.0.1";
    std::optional<int> listen;
    bool list_mutants = false;
    auto* sut_cmd = app.add_subcommand("sut", "Serve a reference implementation of a model");
    sut_cmd->add_option("target", target, "alarm, terminal, or a model file")->required();
    auto* listen_opt = sut_cmd->add_option("--listen", listen, "TCP port (0 picks a free one)");
    sut_cmd->add_option("--host", host, "Address to bind");
    sut_cmd->add_flag("--stdio", "Serve one session on stdin/stdout (default)")->excludes(listen_opt);
    sut_cmd->add_option("--mutant", mutant, "Catalog id or <fault>@<state>.<stimulus>");
    sut_cmd->add_flag("--list-mutants", list_mutants, "List the bundled mutants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*validate_cmd) return cmd_validate(globals, model_path);
        if (*dot_cmd) return cmd_dot(model_path, illegal);
        if (*gen_cmd) return cmd_gen(globals, model_path, cfg_path, out_path);
        if (*compose_cmd) return cmd_compose(globals, compose_paths, out_path, product_name);
        if (*run_cmd) return cmd_run(globals, suite_path, endpoint, parallel, report_path, timeout_ms);
        if (*sut_cmd) return cmd_sut(globals, target, listen, host, mutant, list_mutants);
    } catch (const InputError&) {
        return exit_input;
    } catch (const Error& e) {
        report_error(e);
        return exit_input;
    }
    return exit_input;
}
