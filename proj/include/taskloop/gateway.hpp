#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace taskloop::gateway {

struct Message {
    enum class Role { SYSTEM, USER, ASSISTANT };
    Role role = Role::USER;
    std::string text;
};

/// Ordered chat messages; the first must be the SYSTEM master prompt.
using PromptMessages = std::vector<Message>;

std::string role_name(Message::Role role);
std::optional<Message::Role> role_from_name(const std::string& name);

/// Throws std::invalid_argument if the list is empty or does not start with
/// a SYSTEM message.
void validate_prompt(const PromptMessages& messages);

nlohmann::json messages_to_json(const PromptMessages& messages);
PromptMessages messages_from_json(const nlohmann::json& j);

struct Exchange {
    nlohmann::json request;  // {"messages": [...]}
    std::string response;
    double latency_ms = 0.0;
    std::string backend;
};

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : GatewayError {
    using GatewayError::GatewayError;
};
struct TranscriptLoadError : GatewayError {
    using GatewayError::GatewayError;
};
struct TranscriptExhausted : GatewayError {
    using GatewayError::GatewayError;
};
struct TranscriptMismatch : GatewayError {
    using GatewayError::GatewayError;
};
struct HttpError : GatewayError {
    int status;
    explicit HttpError(int status_, const std::string& what)
        : GatewayError(what), status(status_) {}
};
struct TimeoutError : GatewayError {
    using GatewayError::GatewayError;
};
struct IoError : GatewayError {
    using GatewayError::GatewayError;
};

struct ScriptedConfig {
    std::string transcript_path;
    bool strict = false;  // strict replay verifies the request text too
};

struct HttpConfig {
    std::string endpoint;      // full URL, e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string auth_token_env;  // env var holding the bearer token; empty: no auth
    double temperature = 0.5;
    int max_tokens = 1024;
    int timeout_seconds = 30;
    int retry_count = 3;
    int retry_backoff_ms = 250;
    int max_in_flight = 4;
};

using BackendConfig = std::variant<ScriptedConfig, HttpConfig>;

/// Load an HTTP backend config from a JSON file.
HttpConfig http_config_from_file(const std::string& path);

/// A single-owner completion session with a full transcript of every
/// exchange it served.
class Session {
public:
    virtual ~Session() = default;

    virtual std::string complete(const PromptMessages& messages) = 0;

    const std::vector<Exchange>& exchanges() const { return exchanges_; }
    virtual std::string backend_id() const = 0;

    /// Write the session transcript as JSON Lines; replaying the file
    /// through a scripted session reproduces the identical responses.
    void record(const std::string& path) const;

protected:
    std::vector<Exchange> exchanges_;
};

std::unique_ptr<Session> open_session(const BackendConfig& config);

/// Whitespace-normalized flattening of a request used for strict replay
/// comparison, one "ROLE: text" line per message.
std::string normalize_request(const nlohmann::json& request);

std::vector<Exchange> load_transcript(const std::string& path);

}  // namespace taskloop::gateway
