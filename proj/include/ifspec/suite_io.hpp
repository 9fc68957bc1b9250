#ifndef IFSPEC_SUITE_IO_HPP
#define IFSPEC_SUITE_IO_HPP

#include "ifspec/strategies.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ifspec
{

// Suite files:
//   suite <model> strategy=<name> seed=<int>
//   # coverage <covered>/<total> <percent>%
//   test <id>
//     step CALL <stimulus>[(<arg>,...)] EXPECT [NOTIFY <e> ]* REPLY <e>
//   end
// Lines starting with '#' are comments; only the coverage comment is read back.

/// Coverage summary carried alongside a suite file.
struct CoverageNote
{
    std::size_t covered = 0;
    std::size_t total = 0;

    bool operator==(const CoverageNote&) const = default;
};

inline std::string format_percent(double percent)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", percent);
    return buf;
}

inline void write_suite(std::ostream& out, const TestSuite& suite, std::optional<CoverageNote> note = std::nullopt)
{
    out << "suite " << suite.model << " strategy=" << suite.strategy << " seed=" << suite.seed << '\n';
    if (note) {
        const double pct = note->total == 0 ? 100.0 : 100.0 * static_cast<double>(note->covered) / static_cast<double>(note->total);
        out << "# coverage " << note->covered << '/' << note->total << ' ' << format_percent(pct) << "%\n";
    }
    for (const auto& tc : suite.cases) {
        out << "test " << tc.id << '\n';
        for (const auto& step : tc.steps) {
            out << "  step CALL " << to_string(step.stimulus) << " EXPECT";
            for (const auto& n : step.expect_notify) out << " NOTIFY " << n;
            out << " REPLY " << step.expect_reply << '\n';
        }
        out << "end\n";
    }
}

inline std::string suite_to_string(const TestSuite& suite, std::optional<CoverageNote> note = std::nullopt)
{
    std::ostringstream out;
    write_suite(out, suite, note);
    return out.str();
}

struct LoadedSuite
{
    TestSuite suite;
    std::optional<CoverageNote> coverage;
};

namespace detail
{

inline std::vector<std::string_view> split_words(std::string_view line)
{
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        if (i == line.size()) break;
        // quoted string arguments may contain spaces
        std::size_t j = i;
        bool quoted = false;
        while (j < line.size() && (quoted || line[j] != ' ')) {
            if (quoted && line[j] == '\\' && j + 1 < line.size()) {
                j += 2;
                continue;
            }
            if (line[j] == '"') quoted = !quoted;
            ++j;
        }
        words.push_back(line.substr(i, j - i));
        i = j;
    }
    return words;
}

template<typename T>
bool parse_number(std::string_view s, T& out)
{
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

} // namespace detail

/// Parses a suite file. Throws `suite-format` with the offending line number.
inline LoadedSuite read_suite(std::istream& in)
{
    LoadedSuite loaded;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::optional<TestCase> open;
    auto fail = [&](const std::string& why) { throw Error("suite-format", "line " + std::to_string(lineno) + ": " + why); };

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (view.empty() || view.find_first_not_of(' ') == std::string_view::npos) continue;
        if (view.front() == '#') {
            std::size_t covered = 0, total = 0;
            auto words = detail::split_words(view);
            if (words.size() >= 3 && words[1] == "coverage") {
                const auto slash = words[2].find('/');
                if (slash != std::string_view::npos && detail::parse_number(words[2].substr(0, slash), covered) &&
                    detail::parse_number(words[2].substr(slash + 1), total)) {
                    loaded.coverage = CoverageNote{covered, total};
                }
            }
            continue;
        }
        const auto words = detail::split_words(view);
        if (!have_header) {
            if (words.size() != 4 || words[0] != "suite" || words[2].substr(0, 9) != "strategy=" || words[3].substr(0, 5) != "seed=") {
                fail("expected 'suite <model> strategy=<name> seed=<int>'");
            }
            loaded.suite.model = std::string(words[1]);
            loaded.suite.strategy = std::string(words[2].substr(9));
            if (!detail::parse_number(words[3].substr(5), loaded.suite.seed)) fail("bad seed");
            have_header = true;
            continue;
        }
        if (words[0] == "test") {
            if (open) fail("'test' inside an open test");
            TestCase tc;
            if (words.size() != 2 || !detail::parse_number(words[1], tc.id)) fail("expected 'test <id>'");
            open = std::move(tc);
        } else if (words[0] == "end") {
            if (!open || words.size() != 1) fail("unexpected 'end'");
            if (open->steps.empty()) fail("test " + std::to_string(open->id) + " has no steps");
            loaded.suite.cases.push_back(std::move(*open));
            open.reset();
        } else if (words[0] == "step") {
            if (!open) fail("'step' outside a test");
            if (words.size() < 6 || words[1] != "CALL" || words[3] != "EXPECT") fail("malformed step");
            TestStep step;
            auto g = parse_ground(words[2]);
            if (!g) fail("malformed stimulus '" + std::string(words[2]) + "'");
            step.stimulus = std::move(*g);
            std::size_t i = 4;
            while (i + 1 < words.size() && words[i] == "NOTIFY") {
                if (!is_identifier(words[i + 1])) fail("bad notification name");
                step.expect_notify.emplace_back(words[i + 1]);
                i += 2;
            }
            if (i + 2 != words.size() || words[i] != "REPLY" || !is_identifier(words[i + 1])) fail("expected 'REPLY <event>' at end of step");
            step.expect_reply = std::string(words[i + 1]);
            open->steps.push_back(std::move(step));
        } else {
            fail("unexpected '" + std::string(words[0]) + "'");
        }
    }
    if (!have_header) fail("missing suite header");
    if (open) fail("test " + std::to_string(open->id) + " is not closed with 'end'");
    return loaded;
}

inline LoadedSuite suite_from_string(const std::string& text)
{
    std::istringstream in(text);
    return read_suite(in);
}

/// Raw `[section]` / `key = value` content of a `.cfg` file.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

/// Throws `config` on malformed lines.
inline ConfigSections read_config(std::istream& in)
{
    ConfigSections sections;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto view = trim(line);
        if (view.empty() || view.front() == '#' || view.front() == ';') continue;
        if (view.front() == '[') {
            if (view.back() != ']') throw Error("config", "line " + std::to_string(lineno) + ": unterminated section header");
            section = std::string(trim(view.substr(1, view.size() - 2)));
            sections[section];
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw Error("config", "line " + std::to_string(lineno) + ": expected key = value");
        sections[section][std::string(trim(view.substr(0, eq)))] = std::string(trim(view.substr(eq + 1)));
    }
    return sections;
}

/// Generation settings from the `[gen]`, `[domains]` and `[filter]` sections.
struct GenConfig
{
    std::string strategy = "shorttests";
    std::size_t max_len = 20;
    std::size_t n_cases = 10;
    std::uint64_t seed = 0;
    std::size_t max_states = 1'000'000;
    Combination combination = Combination::cartesian;
    /// `<stimulus>.<param>` -> comma separated literals, resolved against a model later.
    std::map<std::string, std::string> domains;
    std::optional<std::string> must_include;
};

inline GenConfig parse_gen_config(std::istream& in)
{
    GenConfig cfg;
    for (const auto& [section, keys] : read_config(in)) {
        for (const auto& [key, value] : keys) {
            auto number = [&](auto& out) {
                if (!detail::parse_number(std::string_view(value), out)) {
                    throw Error("config", "[" + section + "] " + key + ": expected a non-negative integer");
                }
            };
            if (section == "gen") {
                if (key == "strategy") {
                    if (value != "shorttests" && value != "longtests" && value != "random") {
                        throw Error("config", "unknown strategy '" + value + "'");
                    }
                    cfg.strategy = value;
                } else if (key == "max_len") {
                    number(cfg.max_len);
                } else if (key == "n_cases") {
                    number(cfg.n_cases);
                } else if (key == "seed") {
                    number(cfg.seed);
                } else if (key == "max_states") {
                    number(cfg.max_states);
                } else {
                    throw Error("config", "unknown key [gen] " + key);
                }
            } else if (section == "domains") {
                if (key == "combination") {
                    if (value == "cartesian") {
                        cfg.combination = Combination::cartesian;
                    } else if (value == "pairwise") {
                        cfg.combination = Combination::pairwise;
                    } else {
                        throw Error("config", "unknown combination '" + value + "'");
                    }
                } else {
                    cfg.domains[key] = value;
                }
            } else if (section == "filter" && key == "must_include") {
                cfg.must_include = value;
            } else {
                throw Error("config", "unknown key [" + section + "] " + key);
            }
        }
    }
    return cfg;
}

/**
 *  Resolves `[domains]` entries against the model's parameter sorts.
 *
 *  Int values are decimal literals; string values may be bare or quoted.
 *  Throws `config` for unknown stimuli/params and unparsable values.
 */
inline DomainSpec resolve_domains(const InterfaceModel& model, const GenConfig& cfg)
{
    DomainSpec spec;
    spec.combination = cfg.combination;
    for (const auto& [key, raw] : cfg.domains) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) throw Error("config", "domain key '" + key + "' must be <stimulus>.<param>");
        const auto stimulus = key.substr(0, dot);
        const auto param = key.substr(dot + 1);
        const auto* decl = model.find_event(stimulus);
        if (!decl || decl->kind != EventKind::stimulus) throw Error("config", "domain for unknown stimulus '" + stimulus + "'");
        auto p = std::find_if(decl->params.begin(), decl->params.end(), [&](const Param& x) { return x.name == param; });
        if (p == decl->params.end()) throw Error("config", "stimulus '" + stimulus + "' has no parameter '" + param + "'");

        std::vector<Value> values;
        std::size_t pos = 0;
        const std::string_view text(raw);
        while (pos <= text.size()) {
            while (pos < text.size() && text[pos] == ' ') ++pos;
            std::optional<Value> v;
            if (pos < text.size() && text[pos] == '"') {
                v = detail::read_value(text, pos);
            } else {
                auto end = text.find(',', pos);
                if (end == std::string_view::npos) end = text.size();
                auto item = text.substr(pos, end - pos);
                while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
                if (p->sort == Sort::integer) {
                    v = parse_value(item);
                    if (v && !std::holds_alternative<std::int64_t>(*v)) v.reset();
                } else if (!item.empty()) {
                    v = Value{std::string(item)};
                }
                pos = pos + item.size();
            }
            if (!v || !value_has_sort(*v, p->sort)) throw Error("config", "bad value list for '" + key + "': " + raw);
            values.push_back(std::move(*v));
            while (pos < text.size() && text[pos] == ' ') ++pos;
            if (pos >= text.size()) break;
            if (text[pos] != ',') throw Error("config", "bad value list for '" + key + "': " + raw);
            ++pos;
        }
        spec.assignments[{stimulus, param}] = std::move(values);
    }
    return spec;
}

} // namespace ifspec
#endif // IFSPEC_SUITE_IO_HPP
