#ifndef IFSPEC_PROTOCOL_HPP
#define IFSPEC_PROTOCOL_HPP

#include "ifspec/ground.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace ifspec
{

// Adapter protocol, UTF-8 lines terminated by LF, keywords uppercase:
//   runner -> SUT:  RESET | CALL <event> | CALL <event>(<arg>[,<arg>]*)
//   SUT -> runner:  READY | NOTIFY <event> | REPLY <event>

enum class AdapterKind
{
    ready,
    notify,
    reply
};

/// A line sent by the system under test.
struct AdapterMessage
{
    AdapterKind kind = AdapterKind::ready;
    std::string event;

    bool operator==(const AdapterMessage&) const = default;
};

/// Throws `malformed-message` carrying the offending line.
inline AdapterMessage parse_adapter_line(std::string_view line)
{
    if (line == "READY") return {AdapterKind::ready, {}};
    auto event_after = [&](std::string_view keyword) -> std::optional<std::string> {
        if (line.size() <= keyword.size() + 1 || line.substr(0, keyword.size()) != keyword || line[keyword.size()] != ' ') {
            return std::nullopt;
        }
        auto event = line.substr(keyword.size() + 1);
        if (!is_identifier(event)) return std::nullopt;
        return std::string(event);
    };
    if (auto e = event_after("NOTIFY")) return {AdapterKind::notify, std::move(*e)};
    if (auto e = event_after("REPLY")) return {AdapterKind::reply, std::move(*e)};
    throw Error("malformed-message", "malformed adapter line: '" + std::string(line) + "'");
}

inline std::string format_adapter_message(const AdapterMessage& m)
{
    switch (m.kind) {
        case AdapterKind::ready: return "READY";
        case AdapterKind::notify: return "NOTIFY " + m.event;
        case AdapterKind::reply: return "REPLY " + m.event;
    }
    return {};
}

struct ResetRequest
{
    bool operator==(const ResetRequest&) const = default;
};

struct CallRequest
{
    GroundStimulus stimulus;

    bool operator==(const CallRequest&) const = default;
};

/// A line sent by the test runner.
using RunnerRequest = std::variant<ResetRequest, CallRequest>;

/// Parses a runner line; nullopt if malformed.
inline std::optional<RunnerRequest> parse_runner_line(std::string_view line)
{
    if (line == "RESET") return RunnerRequest{ResetRequest{}};
    if (line.size() > 5 && line.substr(0, 5) == "CALL ") {
        if (auto g = parse_ground(line.substr(5))) return RunnerRequest{CallRequest{std::move(*g)}};
    }
    return std::nullopt;
}

inline std::string format_call(const GroundStimulus& g)
{
    return "CALL " + to_string(g);
}

} // namespace ifspec
#endif // IFSPEC_PROTOCOL_HPP
