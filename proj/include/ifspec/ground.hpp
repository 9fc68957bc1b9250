#ifndef IFSPEC_GROUND_HPP
#define IFSPEC_GROUND_HPP

#include "ifspec/model.hpp"
#include "ifspec/text.hpp"

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ifspec
{

/// Argument value of a ground stimulus.
using Value = std::variant<std::int64_t, std::string>;

inline bool value_has_sort(const Value& v, Sort sort)
{
    return sort == Sort::integer ? std::holds_alternative<std::int64_t>(v) : std::holds_alternative<std::string>(v);
}

/// Decimal for ints; double-quoted with `\"` and `\\` escapes for strings.
inline std::string format_value(const Value& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    std::string out = "\"";
    for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

/// A stimulus name together with concrete argument values.
struct GroundStimulus
{
    std::string name;
    std::vector<Value> args;

    bool operator==(const GroundStimulus&) const = default;
    auto operator<=>(const GroundStimulus&) const = default;
};

/// `name` or `name(arg,arg)`, the form used on the wire and in suite files.
inline std::string to_string(const GroundStimulus& g)
{
    std::string out = g.name;
    if (g.args.empty()) return out;
    out += '(';
    for (std::size_t i = 0; i < g.args.size(); ++i) {
        if (i) out += ',';
        out += format_value(g.args[i]);
    }
    out += ')';
    return out;
}

namespace detail
{

/// Reads one value at `pos`; advances `pos` past it.
inline std::optional<Value> read_value(std::string_view s, std::size_t& pos)
{
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == '"') {
        std::string out;
        ++pos;
        while (pos < s.size()) {
            const char c = s[pos++];
            if (c == '"') return Value{std::move(out)};
            if (c == '\\') {
                if (pos >= s.size() || (s[pos] != '"' && s[pos] != '\\')) return std::nullopt;
                out += s[pos++];
            } else {
                out += c;
            }
        }
        return std::nullopt;
    }
    std::size_t end = pos;
    if (end < s.size() && s[end] == '-') ++end;
    const std::size_t digits = end;
    while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
    if (end == digits) return std::nullopt;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, v);
    if (ec != std::errc{} || p != s.data() + end) return std::nullopt;
    pos = end;
    return Value{v};
}

} // namespace detail

/// Parses a single literal value; the whole string must be consumed.
inline std::optional<Value> parse_value(std::string_view s)
{
    std::size_t pos = 0;
    auto v = detail::read_value(s, pos);
    if (!v || pos != s.size()) return std::nullopt;
    return v;
}

/// Inverse of `to_string(GroundStimulus)`; nullopt if malformed.
inline std::optional<GroundStimulus> parse_ground(std::string_view s)
{
    std::size_t pos = 0;
    while (pos < s.size() && s[pos] != '(') ++pos;
    GroundStimulus g;
    g.name = std::string(s.substr(0, pos));
    if (!is_identifier(g.name)) return std::nullopt;
    if (pos == s.size()) return g;
    ++pos;
    for (;;) {
        auto v = detail::read_value(s, pos);
        if (!v) return std::nullopt;
        g.args.push_back(std::move(*v));
        if (pos < s.size() && s[pos] == ',') {
            ++pos;
            continue;
        }
        if (pos + 1 == s.size() && s[pos] == ')') return g;
        return std::nullopt;
    }
}

} // namespace ifspec
#endif // IFSPEC_GROUND_HPP
