#pragma once

#include <optional>
#include <string>

namespace taskloop {

/// Error raised by an environment while executing a command. The message is
/// deterministic for a given (code, step, state) and is fed back to the
/// planner verbatim.
struct EnvError {
    std::string code;
    std::string message;

    bool operator==(const EnvError&) const = default;
};

/// Snapshot handed to the planner: canonical state text plus the most
/// recent execution error, if any.
struct Perception {
    std::string state_summary;
    std::optional<EnvError> last_error;
};

/// Result of executing one command against an environment.
struct StepOutcome {
    enum class Kind { Ok, ExecFailed, ParseFailed };
    Kind kind = Kind::Ok;
    std::string error_code;     // empty on Ok
    std::string error_message;  // empty on Ok

    bool ok() const { return kind == Kind::Ok; }

    static StepOutcome success() { return {}; }
    static StepOutcome exec_failed(std::string code, std::string message) {
        return {Kind::ExecFailed, std::move(code), std::move(message)};
    }
    static StepOutcome parse_failed(std::string message) {
        return {Kind::ParseFailed, "ParseError", std::move(message)};
    }
};

/// Single-owner mutable state machine. Distinct handles are independent and
/// may run in parallel; one handle must not be shared across threads.
class Environment {
public:
    virtual ~Environment() = default;

    /// Current state summary plus the latest error since the last perceive
    /// (reading clears it).
    virtual Perception perceive() = 0;

    /// Parse and execute one command in the environment's own syntax.
    /// A failing command leaves the state byte-identical.
    virtual StepOutcome execute_command(const std::string& text) = 0;

    /// Canonical serialization of the current state (same text as the
    /// perception summary).
    virtual std::string serialize_state() const = 0;
};

}  // namespace taskloop
