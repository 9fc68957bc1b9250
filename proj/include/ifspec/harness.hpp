#ifndef IFSPEC_HARNESS_HPP
#define IFSPEC_HARNESS_HPP

#include "ifspec/protocol.hpp"
#include "ifspec/strategies.hpp"
#include "ifspec/suite_io.hpp"
#include "ifspec/transport.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ifspec
{

enum class Verdict
{
    pass,
    fail,
    inconclusive
};

inline std::string_view to_string(Verdict v)
{
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Index 0 is the RESET handshake; CALL steps are numbered from 1.
struct StepResult
{
    std::size_t index = 0;
    std::string sent;
    std::vector<std::string> observed_notify;
    std::optional<std::string> observed_reply;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

struct CaseResult
{
    std::size_t id = 0;
    std::vector<StepResult> steps;
    Verdict verdict = Verdict::pass;
    std::vector<std::string> warnings;

    /// The step that decided a non-pass verdict.
    const StepResult* failing_step() const
    {
        for (const auto& s : steps) {
            if (s.verdict != Verdict::pass) return &s;
        }
        return nullptr;
    }
};

struct SuiteReport
{
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t inconclusive = 0;
    std::vector<CaseResult> cases;
    std::chrono::milliseconds duration{0};
    std::optional<CoverageNote> coverage;
};

namespace detail
{

inline std::string join_notifications(const std::vector<std::string>& names)
{
    if (names.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += "NOTIFY " + names[i];
    }
    return out;
}

inline std::string mismatch_detail(const TestStep& expected, const std::vector<std::string>& notify, const std::string& reply)
{
    if (notify != expected.expect_notify) {
        return "expected " + join_notifications(expected.expect_notify) + ", got " + join_notifications(notify);
    }
    return "expected REPLY " + expected.expect_reply + ", got REPLY " + reply;
}

} // namespace detail

/**
 *  Runs one case on a fresh connection: RESET/READY, then each step's CALL
 *  until the first non-pass step. Steps after it are not sent.
 */
inline CaseResult run_case(const Endpoint& endpoint, const TestCase& tc)
{
    using clock = std::chrono::steady_clock;
    CaseResult result;
    result.id = tc.id;
    auto conclude = [&](StepResult step) {
        result.verdict = step.verdict;
        result.steps.push_back(std::move(step));
        return result;
    };
    const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);

    LineChannel channel;
    try {
        channel = LineChannel::open(endpoint);
    } catch (const Error& e) {
        return conclude({0, "RESET", {}, std::nullopt, Verdict::inconclusive, "connection-lost: " + std::string(e.what())});
    }

    {
        StepResult reset{0, "RESET", {}, std::nullopt, Verdict::pass, {}};
        if (!channel.send_line("RESET")) {
            reset.verdict = Verdict::inconclusive;
            reset.detail = "connection-lost: could not send RESET";
            return conclude(std::move(reset));
        }
        const auto deadline = clock::now() + timeout;
        std::string line;
        for (;;) {
            const auto status = channel.read_line(line, deadline);
            if (status == ReadStatus::timeout) {
                reset.verdict = Verdict::inconclusive;
                reset.detail = "timeout: no READY after RESET";
                return conclude(std::move(reset));
            }
            if (status == ReadStatus::closed) {
                reset.verdict = Verdict::inconclusive;
                reset.detail = "connection-lost: closed before READY";
                return conclude(std::move(reset));
            }
            // leftovers from before the reset are tolerated
            if (line == "READY") break;
            result.warnings.push_back("ignored before READY: " + line);
        }
        result.steps.push_back(std::move(reset));
    }

    for (std::size_t i = 0; i < tc.steps.size(); ++i) {
        const auto& step = tc.steps[i];
        StepResult sr{i + 1, format_call(step.stimulus), {}, std::nullopt, Verdict::pass, {}};
        for (auto& extra : channel.drain()) result.warnings.push_back("step " + std::to_string(i + 1) + ": unexpected line after REPLY: " + extra);
        if (!channel.send_line(sr.sent)) {
            sr.verdict = Verdict::inconclusive;
            sr.detail = "connection-lost: could not send CALL";
            return conclude(std::move(sr));
        }
        const auto deadline = clock::now() + timeout;
        std::string line;
        while (!sr.observed_reply) {
            const auto status = channel.read_line(line, deadline);
            if (status == ReadStatus::timeout) {
                sr.verdict = Verdict::inconclusive;
                sr.detail = "timeout: no REPLY within " + std::to_string(endpoint.timeout_ms) + " ms";
                return conclude(std::move(sr));
            }
            if (status == ReadStatus::closed) {
                sr.verdict = Verdict::inconclusive;
                sr.detail = "connection-lost: closed before REPLY";
                return conclude(std::move(sr));
            }
            AdapterMessage msg;
            try {
                msg = parse_adapter_line(line);
            } catch (const Error&) {
                sr.verdict = Verdict::inconclusive;
                sr.detail = "malformed-message: '" + line + "'";
                return conclude(std::move(sr));
            }
            if (msg.kind == AdapterKind::ready) {
                sr.verdict = Verdict::inconclusive;
                sr.detail = "malformed-message: READY outside a RESET";
                return conclude(std::move(sr));
            }
            if (msg.kind == AdapterKind::notify) {
                sr.observed_notify.push_back(std::move(msg.event));
            } else {
                sr.observed_reply = std::move(msg.event);
            }
        }
        if (sr.observed_notify != step.expect_notify || *sr.observed_reply != step.expect_reply) {
            sr.verdict = Verdict::fail;
            sr.detail = detail::mismatch_detail(step, sr.observed_notify, *sr.observed_reply);
            return conclude(std::move(sr));
        }
        result.steps.push_back(std::move(sr));
    }
    result.verdict = Verdict::pass;
    return result;
}

/**
 *  Runs every case on its own connection using up to `parallelism` workers.
 *  Results are ordered as in the suite. Throws `endpoint-unreachable` if a
 *  probe connection fails before any case runs.
 */
inline SuiteReport run_suite(const Endpoint& endpoint, const TestSuite& suite, std::size_t parallelism)
{
    if (parallelism < 1) throw Error("invalid-argument", "parallelism must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    try {
        LineChannel probe = LineChannel::open(endpoint);
    } catch (const Error& e) {
        throw Error("endpoint-unreachable", e.what());
    }

    SuiteReport report;
    report.cases.resize(suite.cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= suite.cases.size()) return;
            report.cases[i] = run_case(endpoint, suite.cases[i]);
        }
    };
    const auto workers = std::min(parallelism, std::max<std::size_t>(suite.cases.size(), 1));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& c : report.cases) {
        switch (c.verdict) {
            case Verdict::pass: ++report.passed; break;
            case Verdict::fail: ++report.failed; break;
            case Verdict::inconclusive: ++report.inconclusive; break;
        }
    }
    report.duration = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return report;
}

/**
 *  Plain-text summary followed by a `[report]` section of `key=value`
 *  lines mirroring the SuiteReport fields.
 */
inline std::string format_report(const TestSuite& suite, const SuiteReport& report)
{
    std::ostringstream out;
    out << "suite " << suite.model << " strategy=" << suite.strategy << " seed=" << suite.seed << '\n';
    for (const auto& c : report.cases) {
        out << "case " << c.id << ' ' << to_string(c.verdict);
        if (const auto* s = c.failing_step()) out << " at step " << s->index << " (" << s->sent << "): " << s->detail;
        out << '\n';
        for (const auto& w : c.warnings) out << "  warning: " << w << '\n';
    }
    out << report.passed << " passed, " << report.failed << " failed, " << report.inconclusive << " inconclusive\n";
    out << "\n[report]\n";
    out << "cases=" << report.cases.size() << '\n';
    out << "pass=" << report.passed << '\n';
    out << "fail=" << report.failed << '\n';
    out << "inconclusive=" << report.inconclusive << '\n';
    out << "duration_ms=" << report.duration.count() << '\n';
    if (report.coverage) {
        out << "coverage_covered=" << report.coverage->covered << '\n';
        out << "coverage_total=" << report.coverage->total << '\n';
    }
    for (const auto& c : report.cases) {
        out << "case." << c.id << '=' << to_string(c.verdict);
        if (const auto* s = c.failing_step()) out << " step=" << s->index << " detail=" << s->detail;
        out << '\n';
    }
    return out.str();
}

} // namespace ifspec
#endif // IFSPEC_HARNESS_HPP
