#include "taskloop/gateway.hpp"

#include <httplib.h>

#include <cctype>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace taskloop::gateway {

namespace {

using nlohmann::json;

std::string collapse_ws(const std::string& s) {
    std::string out;
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

// Process-wide in-flight limiter, keyed by endpoint.
class InFlightLimiter {
public:
    static InFlightLimiter& get(const std::string& endpoint, int limit) {
        static std::mutex registry_mutex;
        static std::map<std::string, std::unique_ptr<InFlightLimiter>> registry;
        std::lock_guard<std::mutex> lock(registry_mutex);
        auto& slot = registry[endpoint];
        if (!slot) slot = std::make_unique<InFlightLimiter>(limit);
        return *slot;
    }

    explicit InFlightLimiter(int limit) : limit_(limit) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        std::lock_guard<std::mutex> lock(mutex_);
        --active_;
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int limit_;
    int active_ = 0;
};

}  // namespace

std::string role_name(Message::Role role) {
    switch (role) {
        case Message::Role::SYSTEM: return "system";
        case Message::Role::USER: return "user";
        case Message::Role::ASSISTANT: return "assistant";
    }
    return "?";
}

std::optional<Message::Role> role_from_name(const std::string& name) {
    if (name == "system") return Message::Role::SYSTEM;
    if (name == "user") return Message::Role::USER;
    if (name == "assistant") return Message::Role::ASSISTANT;
    return std::nullopt;
}

void validate_prompt(const PromptMessages& messages) {
    if (messages.empty()) throw std::invalid_argument("prompt must not be empty");
    if (messages.front().role != Message::Role::SYSTEM) {
        throw std::invalid_argument("first prompt message must be the SYSTEM master prompt");
    }
}

json messages_to_json(const PromptMessages& messages) {
    json arr = json::array();
    for (const auto& m : messages) {
        arr.push_back({{"role", role_name(m.role)}, {"text", m.text}});
    }
    return json{{"messages", arr}};
}

PromptMessages messages_from_json(const json& j) {
    PromptMessages out;
    for (const auto& m : j.value("messages", json::array())) {
        auto role = role_from_name(m.value("role", ""));
        out.push_back(Message{role.value_or(Message::Role::USER), m.value("text", "")});
    }
    return out;
}

std::string normalize_request(const json& request) {
    std::ostringstream out;
    for (const auto& m : request.value("messages", json::array())) {
        out << m.value("role", "") << ": " << collapse_ws(m.value("text", "")) << "\n";
    }
    return out.str();
}

std::vector<Exchange> load_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TranscriptLoadError("cannot open transcript: " + path);
    std::vector<Exchange> out;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw TranscriptLoadError(path + ":" + std::to_string(line_number) +
                                      ": invalid JSON: " + e.what());
        }
        Exchange ex;
        ex.request = j.value("request", json::object());
        if (!j.contains("response") || !j["response"].is_string()) {
            throw TranscriptLoadError(path + ":" + std::to_string(line_number) +
                                      ": missing response string");
        }
        ex.response = j["response"].get<std::string>();
        ex.latency_ms = j.value("latency_ms", 0.0);
        ex.backend = j.value("backend", "scripted");
        out.push_back(std::move(ex));
    }
    return out;
}

void Session::record(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write transcript: " + path);
    for (const auto& ex : exchanges_) {
        json j{{"request", ex.request},
               {"response", ex.response},
               {"latency_ms", ex.latency_ms},
               {"backend", ex.backend}};
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("failed writing transcript: " + path);
}

namespace {

class ScriptedSession final : public Session {
public:
    explicit ScriptedSession(ScriptedConfig config)
        : config_(std::move(config)), recorded_(load_transcript(config_.transcript_path)) {}

    std::string backend_id() const override { return "scripted"; }

    std::string complete(const PromptMessages& messages) override {
        validate_prompt(messages);
        if (position_ >= recorded_.size()) {
            throw TranscriptExhausted("transcript exhausted after " +
                                      std::to_string(recorded_.size()) + " exchange(s): " +
                                      config_.transcript_path);
        }
        const Exchange& rec = recorded_[position_];
        json request = messages_to_json(messages);
        if (config_.strict) {
            std::string want = normalize_request(rec.request);
            std::string got = normalize_request(request);
            if (want != got) {
                throw TranscriptMismatch("strict replay mismatch at exchange " +
                                         std::to_string(position_ + 1) + ": " +
                                         first_diverging_line(want, got));
            }
        }
        ++position_;
        exchanges_.push_back(Exchange{std::move(request), rec.response, 0.0, "scripted"});
        return rec.response;
    }

private:
    static std::string first_diverging_line(const std::string& want, const std::string& got) {
        std::istringstream a(want), b(got);
        std::string la, lb;
        int n = 0;
        while (true) {
            bool ha = static_cast<bool>(std::getline(a, la));
            bool hb = static_cast<bool>(std::getline(b, lb));
            ++n;
            if (!ha && !hb) return "transcripts identical after normalization";
            if (la != lb || ha != hb) {
                return "line " + std::to_string(n) + ": recorded \"" + (ha ? la : "<end>") +
                       "\" vs live \"" + (hb ? lb : "<end>") + "\"";
            }
        }
    }

    ScriptedConfig config_;
    std::vector<Exchange> recorded_;
    size_t position_ = 0;
};

class HttpSession final : public Session {
public:
    explicit HttpSession(HttpConfig config) : config_(std::move(config)) {
        if (config_.temperature < 0.0 || config_.temperature > 2.0) {
            throw ConfigError("temperature must be within [0, 2]");
        }
        if (config_.retry_count < 0) throw ConfigError("retry count must be >= 0");
        if (!config_.auth_token_env.empty()) {
            const char* token = std::getenv(config_.auth_token_env.c_str());
            if (!token || !*token) {
                throw ConfigError("auth token env var not set: " + config_.auth_token_env);
            }
            token_ = token;
        }
        split_endpoint();
    }

    std::string backend_id() const override { return "http:" + config_.model; }

    std::string complete(const PromptMessages& messages) override {
        validate_prompt(messages);
        json body{{"model", config_.model},
                  {"temperature", config_.temperature},
                  {"max_tokens", config_.max_tokens},
                  {"messages", json::array()}};
        for (const auto& m : messages) {
            body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.text}});
        }

        auto& limiter = InFlightLimiter::get(config_.endpoint, config_.max_in_flight);
        limiter.acquire();
        struct Release {
            InFlightLimiter& l;
            ~Release() { l.release(); }
        } release{limiter};

        auto start = std::chrono::steady_clock::now();
        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt <= config_.retry_count; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config_.retry_backoff_ms * (1 << (attempt - 1))));
            }
            httplib::Client client(host_);
            client.set_connection_timeout(config_.timeout_seconds, 0);
            client.set_read_timeout(config_.timeout_seconds, 0);
            httplib::Headers headers;
            if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
            auto res = client.Post(path_, headers, body.dump(), "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;  // transport error: retry
            }
            if (res->status != 200) {
                throw HttpError(res->status, "chat endpoint returned status " +
                                                 std::to_string(res->status) + ": " + res->body);
            }
            std::string text = extract_content(res->body);
            double latency = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
            exchanges_.push_back(
                Exchange{messages_to_json(messages), text, latency, backend_id()});
            return text;
        }
        throw TimeoutError("chat request failed after " + std::to_string(config_.retry_count + 1) +
                           " attempt(s): " + last_error);
    }

private:
    static std::string extract_content(const std::string& body) {
        json j;
        try {
            j = json::parse(body);
        } catch (const json::exception& e) {
            throw HttpError(200, std::string("unparseable chat response: ") + e.what());
        }
        if (!j.contains("choices") || j["choices"].empty()) {
            throw HttpError(200, "chat response has no choices");
        }
        return j["choices"][0].at("message").at("content").get<std::string>();
    }

    void split_endpoint() {
        const std::string& url = config_.endpoint;
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw ConfigError("endpoint must be a full URL: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            host_ = url;
            path_ = "/";
        } else {
            host_ = url.substr(0, path_start);
            path_ = url.substr(path_start);
        }
    }

    HttpConfig config_;
    std::string token_;
    std::string host_;
    std::string path_;
};

}  // namespace

HttpConfig http_config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open backend config: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("backend config is not valid JSON: ") + e.what());
    }
    HttpConfig c;
    c.endpoint = j.at("endpoint").get<std::string>();
    c.model = j.value("model", "");
    c.auth_token_env = j.value("auth_token_env", "");
    c.temperature = j.value("temperature", 0.5);
    c.max_tokens = j.value("max_tokens", 1024);
    c.timeout_seconds = j.value("timeout_seconds", 30);
    c.retry_count = j.value("retry_count", 3);
    c.retry_backoff_ms = j.value("retry_backoff_ms", 250);
    c.max_in_flight = j.value("max_in_flight", 4);
    return c;
}

std::unique_ptr<Session> open_session(const BackendConfig& config) {
    if (const auto* scripted = std::get_if<ScriptedConfig>(&config)) {
        return std::make_unique<ScriptedSession>(*scripted);
    }
    return std::make_unique<HttpSession>(std::get<HttpConfig>(config));
}

}  // namespace taskloop::gateway
