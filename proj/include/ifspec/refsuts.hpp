#ifndef IFSPEC_REFSUTS_HPP
#define IFSPEC_REFSUTS_HPP

#include "ifspec/model.hpp"
#include "ifspec/protocol.hpp"
#include "ifspec/text.hpp"
#include "ifspec/transport.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ifspec
{

inline constexpr std::string_view alarm_source = R"(# Alarm system interface.
interface AlarmSystem {
  initial Deactivated;
  in activate; in deactivate; in triggered;
  out NI_Triggered;
  reply ok;
  state Deactivated { on activate -> Activated reply ok; on deactivate illegal; on triggered illegal; }
  state Activated   { on activate illegal; on deactivate -> Deactivated reply ok; on triggered -> Triggered notify NI_Triggered reply ok; }
  state Triggered   { on activate illegal; on deactivate -> Deactivated reply ok; on triggered illegal; }
}
)";

inline InterfaceModel alarm_model()
{
    return *parse(alarm_source).model;
}

/**
 *  Container-terminal controller interface.
 *
 *  An automated truck shuttles between three cranes (Land, Quay1, Quay2)
 *  and must be docked under a crane before containers change hands. Each
 *  crane's hoist is empty or holds one container. State names read
 *  `<position><Away|Docked><Empty|Loaded>_H<land><quay1><quay2>`.
 *
 *  Safety rules are illegal cells: the truck cannot move while docked, and
 *  a crane may only release onto (or pick up from) a truck docked beneath
 *  it that is empty (or loaded).
 */
inline InterfaceModel terminal_model()
{
    static constexpr std::array<std::string_view, 3> positions{"Land", "Quay1", "Quay2"};
    static constexpr std::array<std::string_view, 3> cranes{"land", "quay1", "quay2"};

    struct Config
    {
        int pos = 0;
        bool docked = false;
        bool loaded = false;
        std::array<bool, 3> hoist{};
    };
    auto name_of = [](const Config& c) {
        std::string n(positions[static_cast<std::size_t>(c.pos)]);
        n += c.docked ? "Docked" : "Away";
        n += c.loaded ? "Loaded" : "Empty";
        n += "_H";
        for (bool h : c.hoist) n += h ? '1' : '0';
        return n;
    };

    InterfaceModel m;
    m.name = "ContainerTerminal";
    for (auto c : cranes) m.alphabet.push_back({"move_" + std::string(c), EventKind::stimulus, {}});
    m.alphabet.push_back({"dock", EventKind::stimulus, {}});
    m.alphabet.push_back({"undock", EventKind::stimulus, {}});
    for (auto c : cranes) {
        for (auto verb : {"hoist_", "release_", "pickup_", "stack_"}) m.alphabet.push_back({verb + std::string(c), EventKind::stimulus, {}});
    }
    m.alphabet.push_back({"NI_TruckDocked", EventKind::notification, {}});
    m.alphabet.push_back({"NI_ContainerOnTruck", EventKind::notification, {}});
    m.alphabet.push_back({"NI_ContainerStacked", EventKind::notification, {}});
    m.alphabet.push_back({"ok", EventKind::reply, {}});
    m.alphabet.push_back({"arrived", EventKind::reply, {}});

    std::vector<Config> configs;
    for (int pos = 0; pos < 3; ++pos) {
        for (int docked = 0; docked < 2; ++docked) {
            for (int loaded = 0; loaded < 2; ++loaded) {
                for (int bits = 0; bits < 8; ++bits) {
                    Config c{pos, docked == 1, loaded == 1, {(bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0}};
                    configs.push_back(c);
                    m.states.push_back(name_of(c));
                }
            }
        }
    }
    m.initial = name_of(Config{});

    for (const auto& c : configs) {
        const auto state = name_of(c);
        auto legal = [&](const std::string& stimulus, Config next, std::vector<std::string> notify, std::string reply) {
            m.rules.push_back({state, stimulus, Transition{std::move(notify), std::move(reply), name_of(next)}});
        };
        auto illegal = [&](const std::string& stimulus) { m.rules.push_back({state, stimulus, std::nullopt}); };

        for (int target = 0; target < 3; ++target) {
            const auto stimulus = "move_" + std::string(cranes[static_cast<std::size_t>(target)]);
            if (c.docked || c.pos == target) {
                illegal(stimulus);
            } else {
                Config next = c;
                next.pos = target;
                legal(stimulus, next, {}, "arrived");
            }
        }
        if (c.docked) {
            illegal("dock");
            Config next = c;
            next.docked = false;
            legal("undock", next, {}, "ok");
        } else {
            Config next = c;
            next.docked = true;
            legal("dock", next, {"NI_TruckDocked"}, "ok");
            illegal("undock");
        }
        for (int k = 0; k < 3; ++k) {
            const auto crane = std::string(cranes[static_cast<std::size_t>(k)]);
            const bool holding = c.hoist[static_cast<std::size_t>(k)];
            const bool beneath = c.docked && c.pos == k;
            if (holding) {
                illegal("hoist_" + crane);
            } else {
                Config next = c;
                next.hoist[static_cast<std::size_t>(k)] = true;
                legal("hoist_" + crane, next, {}, "ok");
            }
            if (holding && beneath && !c.loaded) {
                Config next = c;
                next.hoist[static_cast<std::size_t>(k)] = false;
                next.loaded = true;
                legal("release_" + crane, next, {"NI_ContainerOnTruck"}, "ok");
            } else {
                illegal("release_" + crane);
            }
            if (!holding && beneath && c.loaded) {
                Config next = c;
                next.hoist[static_cast<std::size_t>(k)] = true;
                next.loaded = false;
                legal("pickup_" + crane, next, {}, "ok");
            } else {
                illegal("pickup_" + crane);
            }
            if (holding) {
                Config next = c;
                next.hoist[static_cast<std::size_t>(k)] = false;
                legal("stack_" + crane, next, {"NI_ContainerStacked"}, "ok");
            } else {
                illegal("stack_" + crane);
            }
        }
    }
    return m;
}

inline constexpr std::string_view truck_source = R"(# Truck battery: every trip drains it, charging happens at the land side.
interface TruckBattery {
  initial Full;
  in move_land; in move_quay1; in move_quay2; in charge;
  reply arrived; reply ok;
  state Full  { on move_land -> Half reply arrived; on move_quay1 -> Half reply arrived; on move_quay2 -> Half reply arrived; on charge illegal; }
  state Half  { on move_land -> Low reply arrived; on move_quay1 -> Low reply arrived; on move_quay2 -> Low reply arrived; on charge -> Full reply ok; }
  state Low   { on move_land -> Empty reply arrived; on move_quay1 -> Empty reply arrived; on move_quay2 -> Empty reply arrived; on charge -> Full reply ok; }
  state Empty { on move_land illegal; on move_quay1 illegal; on move_quay2 illegal; on charge -> Full reply ok; }
}
)";

inline InterfaceModel truck_model()
{
    return *parse(truck_source).model;
}

enum class FaultKind
{
    wrong_reply,
    missing_notify,
    wrong_next_state,
    accept_illegal
};

inline std::string_view to_string(FaultKind f)
{
    switch (f) {
        case FaultKind::wrong_reply: return "wrong-reply";
        case FaultKind::missing_notify: return "missing-notify";
        case FaultKind::wrong_next_state: return "wrong-next-state";
        case FaultKind::accept_illegal: return "accept-illegal";
    }
    return "?";
}

inline std::optional<FaultKind> parse_fault(std::string_view s)
{
    for (auto f : {FaultKind::wrong_reply, FaultKind::missing_notify, FaultKind::wrong_next_state, FaultKind::accept_illegal}) {
        if (to_string(f) == s) return f;
    }
    return std::nullopt;
}

/// A seeded fault in one cell of the rule table.
struct MutantSpec
{
    std::string id;
    std::string state;
    std::string stimulus;
    FaultKind fault = FaultKind::wrong_reply;
};

/**
 *  Rule table with the fault applied.
 *
 *  wrong-reply answers another declared reply (or a fresh `<reply>_mutated`);
 *  missing-notify drops the cell's notifications; wrong-next-state stays in
 *  the source state (or moves to the first other state for self-loops);
 *  accept-illegal borrows the first legal cell of the same stimulus, or
 *  replies with the first declared reply and stays put. Throws
 *  `invalid-mutant` when the cell does not admit the fault.
 */
inline InterfaceModel apply_mutant(const InterfaceModel& base, const MutantSpec& mutant)
{
    InterfaceModel m = base;
    auto it = std::find_if(m.rules.begin(), m.rules.end(),
                           [&](const RuleCase& r) { return r.state == mutant.state && r.stimulus == mutant.stimulus; });
    const auto where = cell_location(mutant.state, mutant.stimulus);
    if (it == m.rules.end()) throw Error("invalid-mutant", "mutant " + mutant.id + ": no cell " + where);
    auto reject = [&](const std::string& why) { throw Error("invalid-mutant", "mutant " + mutant.id + " at " + where + ": " + why); };

    if (mutant.fault == FaultKind::accept_illegal) {
        if (it->legal()) reject("cell is already legal");
        auto donor = std::find_if(m.rules.begin(), m.rules.end(),
                                  [&](const RuleCase& r) { return r.stimulus == mutant.stimulus && r.legal(); });
        if (donor != m.rules.end()) {
            it->response = donor->response;
        } else {
            auto reply = std::find_if(m.alphabet.begin(), m.alphabet.end(), [](const EventDecl& d) { return d.kind == EventKind::reply; });
            if (reply == m.alphabet.end()) reject("model declares no reply");
            it->response = Transition{{}, reply->name, mutant.state};
        }
        return m;
    }
    if (!it->legal()) reject("cell is illegal");
    auto& t = *it->response;
    switch (mutant.fault) {
        case FaultKind::wrong_reply: {
            auto other = std::find_if(m.alphabet.begin(), m.alphabet.end(),
                                      [&](const EventDecl& d) { return d.kind == EventKind::reply && d.name != t.reply; });
            if (other != m.alphabet.end()) {
                t.reply = other->name;
            } else {
                t.reply += "_mutated";
                m.alphabet.push_back({t.reply, EventKind::reply, {}});
            }
            break;
        }
        case FaultKind::missing_notify:
            if (t.notifications.empty()) reject("cell has no notifications");
            t.notifications.clear();
            break;
        case FaultKind::wrong_next_state:
            if (t.target != mutant.state) {
                t.target = mutant.state;
            } else {
                auto other = std::find_if(m.states.begin(), m.states.end(), [&](const std::string& s) { return s != mutant.state; });
                if (other == m.states.end()) reject("single-state model");
                t.target = *other;
            }
            break;
        case FaultKind::accept_illegal: break;
    }
    return m;
}

/// A fixture model with its bundled mutants.
struct Fixture
{
    std::string name;
    InterfaceModel model;
    std::vector<MutantSpec> mutants;
};

/**
 *  Bundled fixtures: `alarm` (mutants M1-M5) and `terminal` (T1-T4).
 *
 *  Every bundled mutant diverges from its base model on some trace of
 *  stimuli that are legal in the base model, so generated suites can kill
 *  it. Faults that only show after a stimulus the base model forbids (any
 *  accept-illegal, or wrong-next-state at Activated.triggered in the alarm)
 *  are left out; they remain available through an explicit
 *  `<fault>@<state>.<stimulus>` spec.
 */
inline std::vector<Fixture> fixtures()
{
    return {
        {"alarm",
         alarm_model(),
         {
             {"M1", "Deactivated", "activate", FaultKind::wrong_next_state},
             {"M2", "Activated", "triggered", FaultKind::missing_notify},
             {"M3", "Deactivated", "activate", FaultKind::wrong_reply},
             {"M4", "Activated", "deactivate", FaultKind::wrong_next_state},
             {"M5", "Activated", "deactivate", FaultKind::wrong_reply},
         }},
        {"terminal",
         terminal_model(),
         {
             {"T1", "LandDockedEmpty_H100", "release_land", FaultKind::missing_notify},
             {"T2", "LandAwayEmpty_H000", "dock", FaultKind::wrong_next_state},
             {"T3", "LandAwayEmpty_H000", "move_quay1", FaultKind::wrong_reply},
             {"T4", "Quay1DockedLoaded_H000", "pickup_quay1", FaultKind::wrong_next_state},
         }},
    };
}

inline std::optional<Fixture> find_fixture(std::string_view name)
{
    for (auto& f : fixtures()) {
        if (f.name == name) return std::move(f);
    }
    return std::nullopt;
}

/// Resolves a catalog id (`M3`) or an explicit `<fault>@<state>.<stimulus>`. Throws `invalid-mutant`.
inline MutantSpec resolve_mutant(const std::vector<MutantSpec>& catalog, std::string_view text)
{
    for (const auto& m : catalog) {
        if (m.id == text) return m;
    }
    const auto at = text.find('@');
    const auto dot = text.rfind('.');
    if (at != std::string_view::npos && dot != std::string_view::npos && dot > at) {
        if (auto fault = parse_fault(text.substr(0, at))) {
            return {std::string(text), std::string(text.substr(at + 1, dot - at - 1)), std::string(text.substr(dot + 1)), *fault};
        }
    }
    throw Error("invalid-mutant", "unknown mutant '" + std::string(text) + "'");
}

/**
 *  Protocol state of one connection to a reference SUT. Illegal stimuli are
 *  answered with `REPLY __ILLEGAL__`, malformed lines with
 *  `REPLY __PROTOCOL_ERROR__`.
 */
class SutSession
{
public:
    explicit SutSession(InterfaceModel model, const std::optional<MutantSpec>& mutant = std::nullopt)
        : model_(std::make_shared<const InterfaceModel>(mutant ? apply_mutant(model, *mutant) : std::move(model)))
        , index_(std::make_shared<const ModelIndex>(*model_))
    {
        state_ = index_->state_id(model_->initial);
    }

    std::vector<std::string> handle(std::string_view line)
    {
        const auto request = parse_runner_line(line);
        if (!request) return {"REPLY __PROTOCOL_ERROR__"};
        if (std::holds_alternative<ResetRequest>(*request)) {
            state_ = index_->state_id(model_->initial);
            return {"READY"};
        }
        const auto& call = std::get<CallRequest>(*request).stimulus;
        const auto* decl = model_->find_event(call.name);
        if (!decl || decl->kind != EventKind::stimulus || decl->params.size() != call.args.size()) return {"REPLY __PROTOCOL_ERROR__"};
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            if (!value_has_sort(call.args[i], decl->params[i].sort)) return {"REPLY __PROTOCOL_ERROR__"};
        }
        const auto* rule = index_->rule(state_, index_->stimulus_id(call.name));
        if (!rule || !rule->legal()) return {"REPLY __ILLEGAL__"};
        std::vector<std::string> out;
        for (const auto& n : rule->response->notifications) out.push_back("NOTIFY " + n);
        out.push_back("REPLY " + rule->response->reply);
        state_ = index_->state_id(rule->response->target);
        return out;
    }

    const std::string& state() const { return model_->states[static_cast<std::size_t>(state_)]; }

private:
    std::shared_ptr<const InterfaceModel> model_;
    std::shared_ptr<const ModelIndex> index_;
    std::int32_t state_ = 0;
};

/// Serves one session over `channel` until the peer closes or `stop` is set.
inline void serve_channel(SutSession& session, LineChannel& channel, const std::atomic<bool>* stop = nullptr)
{
    std::string line;
    for (;;) {
        const auto status = channel.read_line(line, std::chrono::steady_clock::now() + std::chrono::milliseconds(100));
        if (status == ReadStatus::closed) return;
        if (status == ReadStatus::timeout) {
            if (stop && stop->load()) return;
            continue;
        }
        for (const auto& reply : session.handle(line)) {
            if (!channel.send_line(reply)) return;
        }
    }
}

/// Serves one session on this process's stdin/stdout until EOF.
inline void serve_stdio(InterfaceModel model, const std::optional<MutantSpec>& mutant)
{
    SutSession session(std::move(model), mutant);
    auto channel = LineChannel::adopt_pipes(STDIN_FILENO, STDOUT_FILENO, false);
    serve_channel(session, channel);
}

/**
 *  Reference SUT on a TCP port, one connection at a time, each starting
 *  from the initial state. Runs on a background thread until `stop()`.
 */
class TcpSutServer
{
public:
    TcpSutServer(InterfaceModel model, std::optional<MutantSpec> mutant, const std::string& host = "127.0.0.1", std::uint16_t port = 0)
        : model_(std::move(model))
        , mutant_(std::move(mutant))
        , listener_(host, port)
    {
        // fail fast on a mutant that does not apply
        SutSession probe(model_, mutant_);
        (void)probe;
    }

    TcpSutServer(const TcpSutServer&) = delete;
    TcpSutServer& operator=(const TcpSutServer&) = delete;
    ~TcpSutServer() { stop(); }

    std::uint16_t port() const { return listener_.port(); }

    void start()
    {
        thread_ = std::thread([this] { run(); });
    }

    /// Blocks serving connections until `stop()` is called from elsewhere.
    void run()
    {
        while (!stop_.load()) {
            const int fd = listener_.accept(100);
            if (fd < 0) continue;
            auto channel = LineChannel::adopt_socket(fd);
            SutSession session(model_, mutant_);
            serve_channel(session, channel, &stop_);
            ++connections_;
        }
    }

    void stop()
    {
        stop_ = true;
        if (thread_.joinable()) thread_.join();
    }

    std::size_t connections() const { return connections_.load(); }

private:
    InterfaceModel model_;
    std::optional<MutantSpec> mutant_;
    TcpListener listener_;
    std::atomic<bool> stop_{false};
    std::atomic<std::size_t> connections_{0};
    std::thread thread_;
};

} // namespace ifspec
#endif // IFSPEC_REFSUTS_HPP
