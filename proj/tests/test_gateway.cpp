#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taskloop/gateway.hpp"
#include "test_util.hpp"

#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

using namespace taskloop::gateway;
namespace fs = std::filesystem;

namespace {

PromptMessages prompt(const std::string& user) {
    return {Message{Message::Role::SYSTEM, "You are a planner."},
            Message{Message::Role::USER, user}};
}

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("prompt validation") {
    CHECK_THROWS_AS(validate_prompt({}), std::invalid_argument);
    CHECK_THROWS_AS(validate_prompt({Message{Message::Role::USER, "hi"}}), std::invalid_argument);
    CHECK_NOTHROW(validate_prompt(prompt("hi")));
}

TEST_CASE("message json round-trip") {
    PromptMessages messages = prompt("plan please");
    PromptMessages back = messages_from_json(messages_to_json(messages));
    REQUIRE(back.size() == 2);
    CHECK(back[0].role == Message::Role::SYSTEM);
    CHECK(back[1].text == "plan please");
}

TEST_CASE("request normalization collapses whitespace") {
    nlohmann::json req = messages_to_json(
        {Message{Message::Role::SYSTEM, "  a\n\n b  "}, Message{Message::Role::USER, "c"}});
    CHECK(normalize_request(req) == "system: a b\nuser: c\n");
}

TEST_CASE("scripted session replays responses positionally") {
    std::string path = temp_path("gw_replay.jsonl");
    write_file(path,
               R"({"request": {"messages": []}, "response": "one"})" "\n"
               "\n"
               R"({"request": {"messages": []}, "response": "two", "backend": "scripted"})" "\n");
    auto session = open_session(ScriptedConfig{path, false});
    CHECK(session->complete(prompt("a")) == "one");
    CHECK(session->complete(prompt("totally different request")) == "two");
    CHECK_THROWS_AS(session->complete(prompt("c")), TranscriptExhausted);
    CHECK(session->exchanges().size() == 2);
}

TEST_CASE("transcript loader reports malformed lines") {
    std::string path = temp_path("gw_bad.jsonl");
    write_file(path, "{\"request\": {}, \"response\": \"x\"}\nnot json\n");
    try {
        load_transcript(path);
        FAIL("expected TranscriptLoadError");
    } catch (const TranscriptLoadError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    write_file(path, "{\"request\": {}}\n");
    CHECK_THROWS_AS(load_transcript(path), TranscriptLoadError);
    CHECK_THROWS_AS(load_transcript(temp_path("gw_missing.jsonl")), TranscriptLoadError);
}

TEST_CASE("strict replay verifies the request text and names the diverging line") {
    std::string path = temp_path("gw_strict.jsonl");
    nlohmann::json recorded{
        {"request", messages_to_json(prompt("expected user text"))},
        {"response", "ok"}};
    write_file(path, recorded.dump() + "\n");

    auto good = open_session(ScriptedConfig{path, true});
    CHECK(good->complete(prompt("  expected   user\ntext ")) == "ok");  // whitespace-insensitive

    auto bad = open_session(ScriptedConfig{path, true});
    try {
        bad->complete(prompt("something else"));
        FAIL("expected TranscriptMismatch");
    } catch (const TranscriptMismatch& e) {
        std::string what = e.what();
        CHECK(what.find("line 2") != std::string::npos);
        CHECK(what.find("expected user text") != std::string::npos);
    }
}

TEST_CASE("record and replay reproduce identical responses") {
    std::string source = temp_path("gw_src.jsonl");
    write_file(source,
               R"({"request": {"messages": []}, "response": "alpha"})" "\n"
               R"({"request": {"messages": []}, "response": "beta"})" "\n");
    auto session = open_session(ScriptedConfig{source, false});
    session->complete(prompt("one"));
    session->complete(prompt("two"));

    std::string recorded = temp_path("gw_recorded.jsonl");
    session->record(recorded);

    // Strict replay of the recording must accept the identical requests.
    auto replay = open_session(ScriptedConfig{recorded, true});
    CHECK(replay->complete(prompt("one")) == "alpha");
    CHECK(replay->complete(prompt("two")) == "beta");
}

TEST_CASE("http config file parsing and validation") {
    std::string path = temp_path("gw_http.json");
    write_file(path, R"({"endpoint": "http://localhost:1/v1/chat/completions",
                         "model": "test-model", "auth_token_env": "TASKLOOP_TEST_TOKEN",
                         "temperature": 0.5, "retry_count": 0})");
    HttpConfig config = http_config_from_file(path);
    CHECK(config.model == "test-model");
    CHECK(config.max_tokens == 1024);
    CHECK(config.timeout_seconds == 30);

    // The bearer token lives in the environment, never in the file; a
    // missing variable fails fast at session construction.
    unsetenv("TASKLOOP_TEST_TOKEN");
    CHECK_THROWS_AS(open_session(config), ConfigError);

    HttpConfig bad = config;
    bad.auth_token_env.clear();
    bad.temperature = 3.0;
    CHECK_THROWS_AS(open_session(bad), ConfigError);
    bad.temperature = 0.5;
    bad.endpoint = "no-scheme";
    CHECK_THROWS_AS(open_session(bad), ConfigError);

    CHECK_THROWS_AS(http_config_from_file(temp_path("gw_nope.json")), ConfigError);
}

TEST_CASE("http session talks to a chat-completion endpoint") {
    httplib::Server server;
    std::string seen_auth;
    nlohmann::json seen_body;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    seen_auth = req.get_header_value("Authorization");
                    seen_body = nlohmann::json::parse(req.body);
                    nlohmann::json reply{
                        {"choices",
                         {{{"message", {{"role", "assistant"}, {"content", "1. step one"}}}}}}};
                    res.set_content(reply.dump(), "application/json");
                });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("TASKLOOP_TEST_TOKEN", "sekret", 1);
    HttpConfig config;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    config.model = "test-model";
    config.auth_token_env = "TASKLOOP_TEST_TOKEN";
    config.retry_count = 0;

    auto session = open_session(config);
    CHECK(session->complete(prompt("plan")) == "1. step one");
    CHECK(seen_auth == "Bearer sekret");
    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["temperature"] == 0.5);
    CHECK(seen_body["messages"][0]["role"] == "system");
    CHECK(session->exchanges().size() == 1);
    CHECK(session->exchanges()[0].latency_ms >= 0.0);

    // Non-200 responses surface as HttpError with the status attached.
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("overloaded", "text/plain");
    });
    HttpConfig broken = config;
    broken.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/broken";
    auto broken_session = open_session(broken);
    try {
        broken_session->complete(prompt("x"));
        FAIL("expected HttpError");
    } catch (const HttpError& e) {
        CHECK(e.status == 503);
    }

    server.stop();
    runner.join();
    unsetenv("TASKLOOP_TEST_TOKEN");
}

TEST_CASE("unreachable endpoints exhaust retries with a timeout error") {
    setenv("TASKLOOP_TEST_TOKEN2", "x", 1);
    HttpConfig config;
    config.endpoint = "http://127.0.0.1:1/v1/chat/completions";  // nothing listens here
    config.model = "m";
    config.retry_count = 1;
    config.retry_backoff_ms = 1;
    config.timeout_seconds = 1;
    auto session = open_session(config);
    CHECK_THROWS_AS(session->complete(prompt("x")), TimeoutError);
    unsetenv("TASKLOOP_TEST_TOKEN2");
}
