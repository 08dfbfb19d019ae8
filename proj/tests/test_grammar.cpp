#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taskloop/grammar.hpp"
#include "test_util.hpp"

#include <random>

using namespace taskloop;

namespace {

std::string random_name(std::mt19937& rng) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789_";
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> pick(0, sizeof(alphabet) - 2);
    int n = len(rng);
    std::string out;
    // Identifiers must not be all digits to survive the plain-ref form too,
    // so force a leading letter.
    out.push_back(alphabet[pick(rng) % 26]);
    for (int i = 1; i < n; ++i) out.push_back(alphabet[pick(rng)]);
    return out;
}

}  // namespace

TEST_CASE("render/parse round-trip holds for 10000 random catalog-valid steps") {
    ActionCatalog cat = testutil::catalog();
    std::vector<std::string> verbs;
    for (const auto& [verb, _] : cat.entries()) verbs.push_back(verb);

    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> id(0, 999);
    for (int i = 0; i < 10000; ++i) {
        ActionStep step;
        step.verb = verbs[rng() % verbs.size()];
        int arity = cat.find(step.verb)->arity;
        for (int a = 0; a < arity; ++a) {
            step.args.push_back(ObjectRef{random_name(rng), id(rng)});
        }
        TranslationResult parsed = parse_step(render_step(step), cat);
        REQUIRE(std::holds_alternative<ActionStep>(parsed));
        CHECK(std::get<ActionStep>(parsed) == step);
    }
}

TEST_CASE("fuzzed input never crashes and always yields a total result") {
    ActionCatalog cat = testutil::catalog();
    std::mt19937 rng(999);
    static const char soup[] = "[]<>() WALKgrab123_pass\t.:!\"\\{}";
    std::uniform_int_distribution<int> len(0, 40);
    std::uniform_int_distribution<int> pick(0, sizeof(soup) - 2);
    for (int i = 0; i < 5000; ++i) {
        std::string text;
        int n = len(rng);
        for (int j = 0; j < n; ++j) text.push_back(soup[pick(rng)]);
        TranslationResult r = parse_step(text, cat);  // must not throw
        if (const auto* step = std::get_if<ActionStep>(&r)) {
            // Anything that parses must round-trip.
            TranslationResult again = parse_step(render_step(*step), cat);
            CHECK(std::get<ActionStep>(again) == *step);
        }
    }
}

TEST_CASE("verbs match case-insensitively and render uppercase") {
    ActionCatalog cat = testutil::catalog();
    auto r = parse_step("[walk] <fridge> (1)", cat);
    REQUIRE(std::holds_alternative<ActionStep>(r));
    CHECK(std::get<ActionStep>(r).verb == "WALK");
    CHECK(render_step(r) == "[WALK] <fridge> (1)");
}

TEST_CASE("object names are case-sensitive identifiers") {
    ActionCatalog cat = testutil::catalog();
    CHECK(std::holds_alternative<ParseError>(parse_step("[WALK] <Fridge> (1)", cat)));
    CHECK(std::holds_alternative<ParseError>(parse_step("[WALK] <fri dge> (1)", cat)));
}

TEST_CASE("pass token detection") {
    ActionCatalog cat = testutil::catalog();
    CHECK(is_pass_token("[Pass]"));
    CHECK(is_pass_token("  [PASS]  "));
    CHECK(is_pass_token("[pass]"));
    CHECK_FALSE(is_pass_token("[Pass] <x> (1)"));
    CHECK_FALSE(is_pass_token("Pass"));
    CHECK(std::holds_alternative<PassToken>(parse_step("[Pass]", cat)));
    auto r = parse_step("[Pass] <x> (1)", cat);
    REQUIRE(std::holds_alternative<ParseError>(r));
    CHECK(std::get<ParseError>(r).reason == ParseError::Reason::Malformed);
}

TEST_CASE("error classification: unknown verb, arity, malformed") {
    ActionCatalog cat = testutil::catalog();
    auto unknown = parse_step("[FLY] <fridge> (1)", cat);
    REQUIRE(std::holds_alternative<ParseError>(unknown));
    CHECK(std::get<ParseError>(unknown).reason == ParseError::Reason::UnknownVerb);

    auto arity = parse_step("[WALK] <fridge> (1) <milk> (1)", cat);
    REQUIRE(std::holds_alternative<ParseError>(arity));
    CHECK(std::get<ParseError>(arity).reason == ParseError::Reason::ArityMismatch);

    auto missing = parse_step("[PUTBACK] <milk> (1)", cat);
    REQUIRE(std::holds_alternative<ParseError>(missing));
    CHECK(std::get<ParseError>(missing).reason == ParseError::Reason::ArityMismatch);

    for (const char* bad : {"", "WALK <fridge> (1)", "[WALK] fridge (1)", "[WALK] <fridge>",
                            "[WALK] <fridge> ()", "[] <fridge> (1)", "[WA LK] <x> (1)"}) {
        auto r = parse_step(bad, cat);
        REQUIRE(std::holds_alternative<ParseError>(r));
        CHECK(std::get<ParseError>(r).reason != ParseError::Reason::UnknownVerb);
    }
}

TEST_CASE("plain object reference form") {
    auto ref = parse_plain_ref("light (1)");
    REQUIRE(ref.has_value());
    CHECK(ref->name == "light");
    CHECK(ref->instance_id == 1);
    CHECK_FALSE(parse_plain_ref("light").has_value());
    CHECK_FALSE(parse_plain_ref("(1)").has_value());
    CHECK_FALSE(parse_plain_ref("light (x)").has_value());
}

TEST_CASE("script parsing keeps line numbers and skips blanks") {
    ActionCatalog cat = testutil::catalog();
    std::string text = "[WALK] <fridge> (1)\n\n  \n[FLY] <x> (1)\n[OPEN] <fridge> (1)\n";
    auto lines = parse_script(text, cat);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].line_number == 1);
    CHECK(lines[1].line_number == 4);
    CHECK(lines[2].line_number == 5);
    auto errs = script_errors(lines);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].rfind("line 4:", 0) == 0);
}

TEST_CASE("catalog validation rejects bad entries") {
    CHECK_THROWS_AS(ActionCatalog::from_json_text("not json"), CatalogError);
    CHECK_THROWS_AS(ActionCatalog::from_json_text(R"({"nope": {}})"), CatalogError);
    CHECK_THROWS_AS(
        ActionCatalog::from_json_text(R"({"verbs": {"X": {"arity": 3}}})"), CatalogError);
    // Template references a slot beyond the declared arity.
    CHECK_THROWS_AS(ActionCatalog::from_json_text(
                        R"({"verbs": {"X": {"arity": 1, "preconditions": ["known 2"]}}})"),
                    CatalogError);
    ActionCatalog cat;
    cat.add("JUMP", CatalogEntry{0, {}, {}});
    CHECK_THROWS_AS(cat.add("jump", CatalogEntry{0, {}, {}}), CatalogError);
}

TEST_CASE("the shipped catalog exposes the twelve household verbs") {
    ActionCatalog cat = testutil::catalog();
    for (const char* verb : {"WALK", "FIND", "GRAB", "OPEN", "CLOSE", "SWITCHON", "SWITCHOFF",
                             "PUTBACK", "PUTON", "SIT", "STANDUP", "DRINK"}) {
        CHECK(cat.contains(verb));
    }
    CHECK(cat.entries().size() == 12);
    CHECK(cat.find("PUTBACK")->arity == 2);
    CHECK(cat.find("STANDUP")->arity == 0);
}
