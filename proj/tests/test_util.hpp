#pragma once

#include "taskloop/eval.hpp"
#include "taskloop/household.hpp"
#include "taskloop/orchestrator.hpp"

#include <nlohmann/json.hpp>

#include <random>
#include <string>

namespace testutil {

inline std::string data_dir() { return TASKLOOP_DATA_DIR; }
inline std::string catalog_path() { return data_dir() + "/catalog/household.json"; }
inline std::string scene_path() { return data_dir() + "/scenes/apartment.json"; }
inline std::string dataset_path() { return data_dir() + "/dataset/tasks.jsonl"; }
inline std::string transcripts_dir() { return data_dir() + "/transcripts"; }
inline std::string tabletop_dir() { return data_dir() + "/tabletop"; }

inline taskloop::ActionCatalog catalog() {
    return taskloop::ActionCatalog::load(catalog_path());
}

inline std::unique_ptr<taskloop::household::HouseholdEnv> apartment() {
    return taskloop::household::HouseholdEnv::load_scene(scene_path(), catalog());
}

/// Independent re-implementation of condition satisfaction used as the
/// oracle against the library's check_conditions/gcr path.
inline bool condition_holds_oracle(const taskloop::household::WorldState& state,
                                   const taskloop::household::Condition& cond) {
    using namespace taskloop::household;
    bool present = false;
    if (cond.kind == Condition::Kind::State) {
        auto it = state.states.find(cond.subject);
        if (it != state.states.end()) present = it->second.count(cond.state) != 0;
    } else {
        // Normalize CLOSE_TO by hand rather than through the library helper.
        taskloop::ObjectRef a = cond.subject;
        taskloop::ObjectRef b = cond.object;
        if (cond.relation == Relation::CLOSE_TO && b < a) std::swap(a, b);
        for (const auto& rel : state.relations) {
            if (rel.relation == cond.relation && rel.subject == a && rel.object == b) {
                present = true;
                break;
            }
        }
    }
    return present == cond.positive;
}

inline double gcr_oracle(const taskloop::household::WorldState& state,
                         const taskloop::household::ConditionSet& tgc) {
    if (tgc.empty()) return 1.0;
    int unsat = 0;
    for (const auto& c : tgc) {
        if (!condition_holds_oracle(state, c)) ++unsat;
    }
    return 1.0 - static_cast<double>(unsat) / static_cast<double>(tgc.size());
}

/// Small randomized household scene: a mix of containers, surfaces,
/// switches, and grabbables with valid initial placements.
inline std::string random_scene_json(std::mt19937& rng) {
    using nlohmann::json;
    std::uniform_int_distribution<int> coin(0, 1);

    json objects = json::array();
    std::vector<std::string> containers, surfaces, fixtures;
    int n_containers = 1 + static_cast<int>(rng() % 3);
    int n_surfaces = 1 + static_cast<int>(rng() % 3);
    int n_switches = static_cast<int>(rng() % 3);
    int n_grabbables = 1 + static_cast<int>(rng() % 5);

    for (int i = 0; i < n_containers; ++i) {
        std::string name = "box" + std::to_string(i);
        bool openable = coin(rng) != 0;
        json obj{{"name", name}, {"id", 1}};
        obj["properties"] = openable ? json{"OPENABLE", "CONTAINER"} : json{"CONTAINER"};
        if (openable) obj["states"] = json{coin(rng) ? "OPEN" : "CLOSED"};
        objects.push_back(obj);
        containers.push_back(name);
    }
    for (int i = 0; i < n_surfaces; ++i) {
        std::string name = "table" + std::to_string(i);
        objects.push_back(json{{"name", name}, {"id", 1}, {"properties", json{"SURFACE"}}});
        surfaces.push_back(name);
    }
    for (int i = 0; i < n_switches; ++i) {
        std::string name = "lamp" + std::to_string(i);
        objects.push_back(json{{"name", name},
                               {"id", 1},
                               {"properties", json{"SWITCHABLE"}},
                               {"states", json{coin(rng) ? "ON" : "OFF"}}});
        fixtures.push_back(name);
    }
    objects.push_back(json{{"name", "mat"}, {"id", 1}, {"properties", json::array()}});

    json relations = json::array();
    std::vector<std::string> grabbables;
    for (int i = 0; i < n_grabbables; ++i) {
        std::string name = "item" + std::to_string(i);
        objects.push_back(json{{"name", name}, {"id", 1}, {"properties", json{"GRABBABLE"}}});
        grabbables.push_back(name);
        int placement = static_cast<int>(rng() % 3);
        if (placement == 0) {
            relations.push_back(json{name + " (1)", "INSIDE",
                                     containers[rng() % containers.size()] + " (1)"});
        } else if (placement == 1) {
            relations.push_back(json{name + " (1)", "ONTOP",
                                     surfaces[rng() % surfaces.size()] + " (1)"});
        }
    }
    if (!surfaces.empty() && !containers.empty() && coin(rng)) {
        relations.push_back(json{containers[0] + " (1)", "CLOSE_TO", surfaces[0] + " (1)"});
    }

    json doc{{"objects", objects}, {"relations", relations}, {"agent", {{"anchor", "mat (1)"}}}};
    return doc.dump();
}

/// One random syntactically valid command against the apartment/any scene.
inline std::string random_command(std::mt19937& rng,
                                  const taskloop::ActionCatalog& cat,
                                  const std::vector<taskloop::ObjectRef>& objects) {
    std::vector<std::string> verbs;
    for (const auto& [verb, _] : cat.entries()) verbs.push_back(verb);
    const std::string& verb = verbs[rng() % verbs.size()];
    const auto* entry = cat.find(verb);
    std::string out = "[" + verb + "]";
    for (int i = 0; i < entry->arity; ++i) {
        out += " " + objects[rng() % objects.size()].render();
    }
    return out;
}

inline std::vector<taskloop::ObjectRef> object_refs(const taskloop::household::WorldState& state) {
    std::vector<taskloop::ObjectRef> out;
    for (const auto& [ref, _] : state.objects) out.push_back(ref);
    return out;
}

inline taskloop::orchestrator::ExemplarSets exemplars() {
    auto cat = catalog();
    auto tuples = taskloop::eval::load_dataset(dataset_path(), cat);
    return taskloop::eval::exemplars_from_dataset(tuples);
}

inline taskloop::eval::SuiteConfig suite_config(int k = 3, int runs = 5) {
    taskloop::eval::SuiteConfig config;
    config.dataset_path = dataset_path();
    config.scenes_dir = data_dir() + "/scenes";
    config.catalog_path = catalog_path();
    config.transcripts_dir = transcripts_dir();
    config.k = k;
    config.runs = runs;
    return config;
}

}  // namespace testutil
