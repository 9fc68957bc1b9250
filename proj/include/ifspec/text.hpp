#ifndef IFSPEC_TEXT_HPP
#define IFSPEC_TEXT_HPP

#include "ifspec/model.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ifspec
{

struct SourceSpan
{
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t length = 1;

    bool operator==(const SourceSpan&) const = default;
};

struct ParseError
{
    SourceSpan span;
    std::string code;
    std::string message;
};

struct ParseResult
{
    std::optional<InterfaceModel> model;
    std::vector<ParseError> errors;

    explicit operator bool() const { return model.has_value(); }
};

inline bool is_identifier_head(char c)
{
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

inline bool is_identifier_tail(char c)
{
    return is_identifier_head(c) || (c >= '0' && c <= '9');
}

/// `[A-Za-z_][A-Za-z0-9_]*`
inline bool is_identifier(std::string_view s)
{
    return !s.empty() && is_identifier_head(s[0]) && std::all_of(s.begin() + 1, s.end(), is_identifier_tail);
}

namespace detail
{

struct Token
{
    enum class Kind
    {
        ident,
        punct,
        arrow,
        end
    };
    Kind kind = Kind::end;
    std::string text;
    SourceSpan span;
};

struct SyntaxAbort
{
};

class Lexer
{
public:
    explicit Lexer(std::string_view text)
        : text_(text)
    {
    }

    /// Returns nullopt and fills `error` on an unexpected character.
    std::optional<Token> next(ParseError& error)
    {
        skip_blank();
        Token tok;
        tok.span = {line_, column_, 1};
        if (pos_ >= text_.size()) {
            tok.kind = Token::Kind::end;
            return tok;
        }
        const char c = text_[pos_];
        if (is_identifier_head(c)) {
            std::size_t end = pos_ + 1;
            while (end < text_.size() && is_identifier_tail(text_[end])) ++end;
            tok.kind = Token::Kind::ident;
            tok.text = std::string(text_.substr(pos_, end - pos_));
            tok.span.length = end - pos_;
            advance(end - pos_);
            return tok;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            tok.kind = Token::Kind::arrow;
            tok.text = "->";
            tok.span.length = 2;
            advance(2);
            return tok;
        }
        if (std::string_view("{};(),:").find(c) != std::string_view::npos) {
            tok.kind = Token::Kind::punct;
            tok.text = std::string(1, c);
            advance(1);
            return tok;
        }
        error = {tok.span, "syntax", "unexpected character " + describe(c)};
        return std::nullopt;
    }

private:
    static std::string describe(char c)
    {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7f) return std::string("'") + c + "'";
        std::ostringstream out;
        out << "byte 0x" << std::hex << static_cast<int>(u);
        return out.str();
    }

    void skip_blank()
    {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance(1);
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
            } else {
                break;
            }
        }
    }

    void advance(std::size_t n)
    {
        for (std::size_t i = 0; i < n; ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser
{
public:
    explicit Parser(std::string_view text)
        : lexer_(text)
    {
    }

    ParseResult run()
    {
        ParseResult result;
        try {
            bump();
            auto model = parse_model();
            if (errors_.empty()) result.model = std::move(model);
        } catch (const SyntaxAbort&) {
        }
        result.errors = std::move(errors_);
        return result;
    }

private:
    void bump()
    {
        ParseError err;
        auto tok = lexer_.next(err);
        if (!tok) {
            errors_.push_back(err);
            throw SyntaxAbort{};
        }
        tok_ = std::move(*tok);
    }

    [[noreturn]] void fail(const std::string& expected)
    {
        std::string found = tok_.kind == Token::Kind::end ? "end of input" : "'" + tok_.text + "'";
        errors_.push_back({tok_.span, "syntax", "expected " + expected + " but found " + found});
        throw SyntaxAbort{};
    }

    bool at_keyword(std::string_view kw) const { return tok_.kind == Token::Kind::ident && tok_.text == kw; }
    bool at_punct(char p) const { return tok_.kind == Token::Kind::punct && tok_.text[0] == p; }

    void expect_keyword(std::string_view kw)
    {
        if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
        bump();
    }

    void expect_punct(char p)
    {
        if (!at_punct(p)) fail(std::string("'") + p + "'");
        bump();
    }

    Token expect_ident(const std::string& what)
    {
        if (tok_.kind != Token::Kind::ident) fail(what);
        Token t = tok_;
        bump();
        return t;
    }

    InterfaceModel parse_model()
    {
        InterfaceModel m;
        expect_keyword("interface");
        m.name = expect_ident("interface name").text;
        expect_punct('{');
        expect_keyword("initial");
        m.initial = expect_ident("initial state name").text;
        expect_punct(';');

        std::set<std::string> events;
        bool any = false;
        while (at_keyword("in") || at_keyword("out") || at_keyword("reply")) {
            any = true;
            EventDecl d;
            d.kind = at_keyword("in") ? EventKind::stimulus : at_keyword("out") ? EventKind::notification : EventKind::reply;
            bump();
            auto name = expect_ident("event name");
            d.name = name.text;
            if (d.kind == EventKind::stimulus && at_punct('(')) d.params = parse_params();
            expect_punct(';');
            if (!events.insert(d.name).second) {
                errors_.push_back({name.span, "duplicate-declaration", "event '" + d.name + "' is already declared"});
                continue;
            }
            m.alphabet.push_back(std::move(d));
        }
        if (!any) fail("an event declaration ('in', 'out' or 'reply')");

        std::set<std::string> states;
        if (!at_keyword("state")) fail("'state'");
        while (at_keyword("state")) {
            bump();
            auto name = expect_ident("state name");
            expect_punct('{');
            std::vector<RuleCase> rules;
            while (at_keyword("on")) rules.push_back(parse_rule(name.text));
            expect_punct('}');
            if (!states.insert(name.text).second) {
                errors_.push_back({name.span, "duplicate-declaration", "state '" + name.text + "' is already declared"});
                continue;
            }
            m.states.push_back(name.text);
            for (auto& r : rules) m.rules.push_back(std::move(r));
        }
        expect_punct('}');
        if (tok_.kind != Token::Kind::end) fail("end of input");
        return m;
    }

    std::vector<Param> parse_params()
    {
        std::vector<Param> params;
        expect_punct('(');
        for (;;) {
            Param p;
            p.name = expect_ident("parameter name").text;
            expect_punct(':');
            auto sort = expect_ident("parameter sort");
            if (sort.text == "int") {
                p.sort = Sort::integer;
            } else if (sort.text == "string") {
                p.sort = Sort::string;
            } else {
                errors_.push_back({sort.span, "unknown-sort", "unknown sort '" + sort.text + "' (expected int or string)"});
            }
            params.push_back(std::move(p));
            if (at_punct(',')) {
                bump();
                continue;
            }
            expect_punct(')');
            return params;
        }
    }

    RuleCase parse_rule(const std::string& state)
    {
        expect_keyword("on");
        RuleCase r;
        r.state = state;
        r.stimulus = expect_ident("stimulus name").text;
        if (at_keyword("illegal")) {
            bump();
        } else if (tok_.kind == Token::Kind::arrow) {
            bump();
            Transition t;
            t.target = expect_ident("target state").text;
            if (at_keyword("notify")) {
                bump();
                t.notifications.push_back(expect_ident("notification name").text);
                while (at_punct(',')) {
                    bump();
                    t.notifications.push_back(expect_ident("notification name").text);
                }
            }
            expect_keyword("reply");
            t.reply = expect_ident("reply name").text;
            r.response = std::move(t);
        } else {
            fail("'illegal' or '->'");
        }
        expect_punct(';');
        return r;
    }

    Lexer lexer_;
    Token tok_;
    std::vector<ParseError> errors_;
};

} // namespace detail

/// Parses interface-model text. Never throws on malformed input.
inline ParseResult parse(std::string_view text)
{
    return detail::Parser(text).run();
}

/// Reads and parses a file. Throws `io` if it cannot be read.
inline ParseResult parse_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

inline std::string format_parse_error(const std::string& origin, const ParseError& e)
{
    return origin + ":" + std::to_string(e.span.line) + ":" + std::to_string(e.span.column) + ": " + e.code + ": " + e.message;
}

/// Canonical text form: one declaration per line, one line per state.
inline std::string serialize(const InterfaceModel& model)
{
    std::ostringstream out;
    out << "interface " << model.name << " {\n";
    out << "  initial " << model.initial << ";\n";
    for (const auto& d : model.alphabet) {
        out << "  " << to_string(d.kind) << ' ' << d.name;
        if (!d.params.empty()) {
            out << '(';
            for (std::size_t i = 0; i < d.params.size(); ++i) {
                if (i) out << ", ";
                out << d.params[i].name << ':' << to_string(d.params[i].sort);
            }
            out << ')';
        }
        out << ";\n";
    }
    for (const auto& state : model.states) {
        out << "  state " << state << " {";
        for (const auto& rule : model.rules) {
            if (rule.state != state) continue;
            out << " on " << rule.stimulus;
            if (!rule.response) {
                out << " illegal;";
                continue;
            }
            out << " -> " << rule.response->target;
            if (!rule.response->notifications.empty()) {
                out << " notify ";
                for (std::size_t i = 0; i < rule.response->notifications.size(); ++i) {
                    if (i) out << ", ";
                    out << rule.response->notifications[i];
                }
            }
            out << " reply " << rule.response->reply << ';';
        }
        out << " }\n";
    }
    out << "}\n";
    return out.str();
}

inline std::string dot_quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

/**
 *  Renders the reachable state diagram as a DOT digraph.
 *
 *  Edges are labeled `stimulus / reply [+n1, n2]`. With `show_illegal`,
 *  every illegal cell of a reachable state gets a dashed edge to an
 *  `ILLEGAL` sink node.
 */
inline std::string render_dot(const InterfaceModel& model, bool show_illegal)
{
    const ModelIndex index(model);
    const auto order = detail::reachable_ids(index, index.state_id(model.initial));
    std::vector<char> seen(index.state_count(), 0);
    for (auto s : order) seen[static_cast<std::size_t>(s)] = 1;

    std::string sink = "__ILLEGAL__";
    while (model.has_state(sink)) sink += "_";

    std::ostringstream out;
    out << "digraph " << dot_quote(model.name) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle];\n";
    for (std::size_t s = 0; s < model.states.size(); ++s) {
        if (!seen[s]) continue;
        out << "  " << dot_quote(model.states[s]);
        if (model.states[s] == model.initial) out << " [shape=doublecircle]";
        out << ";\n";
    }
    std::ostringstream illegal;
    bool any_illegal = false;
    const auto n_stimuli = static_cast<std::int32_t>(index.stimuli().size());
    for (std::size_t s = 0; s < model.states.size(); ++s) {
        if (!seen[s]) continue;
        for (std::int32_t e = 0; e < n_stimuli; ++e) {
            const auto* rule = index.rule(static_cast<std::int32_t>(s), e);
            if (!rule) continue;
            if (!rule->legal()) {
                if (show_illegal) {
                    any_illegal = true;
                    illegal << "  " << dot_quote(model.states[s]) << " -> " << dot_quote(sink)
                            << " [label=" << dot_quote(rule->stimulus) << ", style=dashed];\n";
                }
                continue;
            }
            std::string label = rule->stimulus + " / " + rule->response->reply;
            if (!rule->response->notifications.empty()) {
                label += " [+";
                for (std::size_t i = 0; i < rule->response->notifications.size(); ++i) {
                    if (i) label += ", ";
                    label += rule->response->notifications[i];
                }
                label += "]";
            }
            out << "  " << dot_quote(model.states[s]) << " -> " << dot_quote(rule->response->target)
                << " [label=" << dot_quote(label) << "];\n";
        }
    }
    if (any_illegal) {
        out << "  " << dot_quote(sink) << " [label=\"ILLEGAL\", shape=box];\n";
        out << illegal.str();
    }
    out << "}\n";
    return out.str();
}

} // namespace ifspec
#endif // IFSPEC_TEXT_HPP
