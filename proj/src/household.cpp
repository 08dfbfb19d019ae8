#include "taskloop/household.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace taskloop::household {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneError("cannot open scene file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// "name (id)"
ObjectRef parse_ref(const std::string& text) {
    auto open = text.find('(');
    auto close = text.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw SceneError("malformed object reference: " + text);
    }
    std::string name = text.substr(0, open);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    if (name.empty()) throw SceneError("malformed object reference: " + text);
    std::string digits = text.substr(open + 1, close - open - 1);
    try {
        return ObjectRef{name, std::stoi(digits)};
    } catch (const std::exception&) {
        throw SceneError("malformed object reference: " + text);
    }
}

std::string render_plain(const ObjectRef& ref) {
    if (ref == agent_ref()) return "agent";
    return ref.name + " (" + std::to_string(ref.instance_id) + ")";
}

BinState complement(BinState s) {
    switch (s) {
        case BinState::ON: return BinState::OFF;
        case BinState::OFF: return BinState::ON;
        case BinState::OPEN: return BinState::CLOSED;
        case BinState::CLOSED: return BinState::OPEN;
    }
    return BinState::ON;
}

}  // namespace

std::string to_string(Property p) {
    switch (p) {
        case Property::SWITCHABLE: return "SWITCHABLE";
        case Property::OPENABLE: return "OPENABLE";
        case Property::GRABBABLE: return "GRABBABLE";
        case Property::CONTAINER: return "CONTAINER";
        case Property::SURFACE: return "SURFACE";
        case Property::SITTABLE: return "SITTABLE";
    }
    return "?";
}

std::string to_string(BinState s) {
    switch (s) {
        case BinState::ON: return "ON";
        case BinState::OFF: return "OFF";
        case BinState::OPEN: return "OPEN";
        case BinState::CLOSED: return "CLOSED";
    }
    return "?";
}

std::string to_string(Relation r) {
    switch (r) {
        case Relation::INSIDE: return "INSIDE";
        case Relation::ONTOP: return "ONTOP";
        case Relation::CLOSE_TO: return "CLOSE_TO";
        case Relation::HOLDS: return "HOLDS";
    }
    return "?";
}

std::optional<Property> property_from_string(const std::string& s) {
    for (Property p : {Property::SWITCHABLE, Property::OPENABLE, Property::GRABBABLE,
                       Property::CONTAINER, Property::SURFACE, Property::SITTABLE}) {
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

std::optional<BinState> state_from_string(const std::string& s) {
    for (BinState b : {BinState::ON, BinState::OFF, BinState::OPEN, BinState::CLOSED}) {
        if (to_string(b) == s) return b;
    }
    return std::nullopt;
}

std::optional<Relation> relation_from_string(const std::string& s) {
    for (Relation r : {Relation::INSIDE, Relation::ONTOP, Relation::CLOSE_TO, Relation::HOLDS}) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

const ObjectRef& agent_ref() {
    static const ObjectRef agent{"agent", 0};
    return agent;
}

RelationTriple RelationTriple::normalized(ObjectRef subject, Relation relation, ObjectRef object) {
    if (relation == Relation::CLOSE_TO && object < subject) {
        std::swap(subject, object);
    }
    return RelationTriple{std::move(subject), relation, std::move(object)};
}

std::string RelationTriple::render() const {
    return render_plain(subject) + " " + to_string(relation) + " " + render_plain(object);
}

bool WorldState::has_state(const ObjectRef& obj, BinState s) const {
    auto it = states.find(obj);
    return it != states.end() && it->second.count(s) != 0;
}

bool WorldState::has_relation(const ObjectRef& subject, Relation r, const ObjectRef& object) const {
    return relations.count(RelationTriple::normalized(subject, r, object)) != 0;
}

std::optional<ObjectRef> WorldState::container_of(const ObjectRef& obj) const {
    for (const auto& rel : relations) {
        if (rel.relation == Relation::INSIDE && rel.subject == obj) return rel.object;
    }
    return std::nullopt;
}

bool WorldState::held(const ObjectRef& obj) const {
    return has_relation(agent_ref(), Relation::HOLDS, obj);
}

std::string WorldState::summary() const {
    std::ostringstream out;
    for (const auto& [ref, st] : states) {
        std::vector<std::string> names;
        for (BinState s : st) names.push_back(to_string(s));
        std::sort(names.begin(), names.end());
        for (const auto& n : names) {
            out << "STATE " << render_plain(ref) << ": " << n << "\n";
        }
    }
    for (const auto& rel : relations) {
        out << "REL " << rel.render() << "\n";
    }
    out << "AGENT at " << render_plain(agent.location_anchor) << ", hands: [";
    bool first = true;
    for (const auto& hand : {agent.left_hand, agent.right_hand}) {
        if (!hand) continue;
        if (!first) out << ", ";
        out << render_plain(*hand);
        first = false;
    }
    out << "]\n";
    return out.str();
}

std::string Condition::render() const {
    std::string body;
    if (kind == Kind::State) {
        body = render_plain(subject) + " has " + to_string(state);
    } else {
        body = RelationTriple{subject, relation, object}.render();
    }
    return positive ? body : "NOT " + body;
}

ConditionSet state_diff(const WorldState& before, const WorldState& after) {
    auto keys = [](const WorldState& w) {
        std::vector<ObjectRef> k;
        for (const auto& [ref, _] : w.objects) k.push_back(ref);
        return k;
    };
    if (keys(before) != keys(after)) {
        throw UniverseMismatch("state_diff requires the same object universe");
    }

    ConditionSet diff;
    for (const auto& [ref, _] : after.objects) {
        for (BinState s : {BinState::ON, BinState::OFF, BinState::OPEN, BinState::CLOSED}) {
            bool b = before.has_state(ref, s);
            bool a = after.has_state(ref, s);
            if (a && !b) diff.insert(Condition{true, Condition::Kind::State, ref, s, {}, {}});
            if (b && !a) diff.insert(Condition{false, Condition::Kind::State, ref, s, {}, {}});
        }
    }
    for (const auto& rel : after.relations) {
        if (!before.relations.count(rel)) {
            diff.insert(Condition{true, Condition::Kind::Rel, rel.subject, {}, rel.relation, rel.object});
        }
    }
    for (const auto& rel : before.relations) {
        if (!after.relations.count(rel)) {
            diff.insert(Condition{false, Condition::Kind::Rel, rel.subject, {}, rel.relation, rel.object});
        }
    }
    return diff;
}

ConditionPartition check_conditions(const WorldState& state, const ConditionSet& conds) {
    ConditionPartition out;
    for (const auto& cond : conds) {
        for (const ObjectRef* ref : {&cond.subject, cond.kind == Condition::Kind::Rel ? &cond.object : nullptr}) {
            if (ref && *ref != agent_ref() && !state.objects.count(*ref)) {
                throw UnknownObjectError("condition references unknown object: " + render_plain(*ref));
            }
        }
        bool holds;
        if (cond.kind == Condition::Kind::State) {
            holds = state.has_state(cond.subject, cond.state);
        } else {
            holds = state.has_relation(cond.subject, cond.relation, cond.object);
        }
        if (holds == cond.positive) {
            out.satisfied.insert(cond);
        } else {
            out.unsatisfied.insert(cond);
        }
    }
    return out;
}

HouseholdEnv::HouseholdEnv(WorldState state, ActionCatalog catalog)
    : state_(std::move(state)), catalog_(std::move(catalog)) {}

std::unique_ptr<HouseholdEnv> HouseholdEnv::load_scene(const std::string& path,
                                                       ActionCatalog catalog) {
    return from_json_text(read_file(path), std::move(catalog));
}

std::unique_ptr<HouseholdEnv> HouseholdEnv::from_json_text(const std::string& text,
                                                           ActionCatalog catalog) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SceneError(std::string("scene is not valid JSON: ") + e.what());
    }

    WorldState state;
    for (const auto& obj : doc.value("objects", json::array())) {
        ObjectInstance inst;
        inst.name = obj.at("name").get<std::string>();
        inst.id = obj.value("id", 1);
        for (const auto& p : obj.value("properties", json::array())) {
            auto prop = property_from_string(p.get<std::string>());
            if (!prop) throw SceneError("unknown property " + p.get<std::string>() + " on " + inst.name);
            inst.properties.insert(*prop);
        }
        if (state.objects.count(inst.ref())) {
            throw SceneError("duplicate object: " + render_plain(inst.ref()));
        }
        std::set<BinState> st;
        for (const auto& s : obj.value("states", json::array())) {
            auto bs = state_from_string(s.get<std::string>());
            if (!bs) throw SceneError("unknown state " + s.get<std::string>() + " on " + inst.name);
            st.insert(*bs);
        }
        ObjectRef ref = inst.ref();
        state.objects.emplace(ref, std::move(inst));
        if (!st.empty()) state.states.emplace(ref, std::move(st));
    }

    for (const auto& rel : doc.value("relations", json::array())) {
        if (!rel.is_array() || rel.size() != 3) {
            throw SceneError("relation entries must be [subject, relation, object] triples");
        }
        ObjectRef subject = parse_ref(rel[0].get<std::string>());
        auto relation = relation_from_string(rel[1].get<std::string>());
        ObjectRef object = parse_ref(rel[2].get<std::string>());
        if (!relation) throw SceneError("unknown relation: " + rel[1].get<std::string>());
        if (*relation == Relation::HOLDS) {
            throw SceneError("HOLDS relations are agent-managed; scenes may not declare them");
        }
        for (const ObjectRef& r : {subject, object}) {
            if (!state.objects.count(r)) {
                throw SceneError("relation references nonexistent object: " + render_plain(r));
            }
        }
        state.relations.insert(RelationTriple::normalized(subject, *relation, object));
    }

    // Exclusivity and single-container invariants.
    for (const auto& [ref, inst] : state.objects) {
        auto it = state.states.find(ref);
        const std::set<BinState> empty;
        const std::set<BinState>& st = it == state.states.end() ? empty : it->second;
        int open_closed = static_cast<int>(st.count(BinState::OPEN)) + static_cast<int>(st.count(BinState::CLOSED));
        int on_off = static_cast<int>(st.count(BinState::ON)) + static_cast<int>(st.count(BinState::OFF));
        if (inst.properties.count(Property::OPENABLE)) {
            if (open_closed != 1) {
                throw SceneError(render_plain(ref) + " is OPENABLE and must have exactly one of OPEN/CLOSED");
            }
        } else if (open_closed != 0) {
            throw SceneError(render_plain(ref) + " has OPEN/CLOSED but is not OPENABLE");
        }
        if (inst.properties.count(Property::SWITCHABLE)) {
            if (on_off != 1) {
                throw SceneError(render_plain(ref) + " is SWITCHABLE and must have exactly one of ON/OFF");
            }
        } else if (on_off != 0) {
            throw SceneError(render_plain(ref) + " has ON/OFF but is not SWITCHABLE");
        }
        int containers = 0;
        for (const auto& rel : state.relations) {
            if (rel.relation == Relation::INSIDE && rel.subject == ref) ++containers;
        }
        if (containers > 1) {
            throw SceneError(render_plain(ref) + " is INSIDE more than one container");
        }
    }

    if (!doc.contains("agent") || !doc["agent"].contains("anchor")) {
        throw SceneError("scene must declare agent.anchor");
    }
    state.agent.location_anchor = parse_ref(doc["agent"]["anchor"].get<std::string>());
    if (!state.objects.count(state.agent.location_anchor)) {
        throw SceneError("agent anchor references nonexistent object: " +
                         render_plain(state.agent.location_anchor));
    }

    return std::unique_ptr<HouseholdEnv>(new HouseholdEnv(std::move(state), std::move(catalog)));
}

StepOutcome HouseholdEnv::check_precondition(const std::string& templ, const ActionStep& step) {
    std::istringstream iss(templ);
    std::string op;
    iss >> op;
    auto arg = [&](int slot) -> const ObjectRef& { return step.args.at(slot - 1); };
    auto read_slot = [&]() {
        int slot = 0;
        iss >> slot;
        return slot;
    };
    std::string prefix = "cannot execute " + render_step(step) + ": ";

    auto reachable = [&](const ObjectRef& obj) {
        const ObjectRef& anchor = state_.agent.location_anchor;
        if (obj == anchor) return true;
        if (state_.held(obj)) return true;
        if (state_.has_relation(anchor, Relation::CLOSE_TO, obj)) return true;
        if (state_.has_relation(obj, Relation::INSIDE, anchor)) return true;
        if (state_.has_relation(obj, Relation::ONTOP, anchor)) return true;
        // Objects inside/on something the agent stands next to.
        for (const auto& rel : state_.relations) {
            if (rel.subject != obj) continue;
            if (rel.relation != Relation::INSIDE && rel.relation != Relation::ONTOP) continue;
            if (rel.object == anchor || state_.has_relation(anchor, Relation::CLOSE_TO, rel.object)) {
                return true;
            }
        }
        return false;
    };

    if (op == "known") {
        read_slot();  // existence already checked for every argument
        return StepOutcome::success();
    }
    if (op == "property") {
        int slot = read_slot();
        std::string prop_name;
        iss >> prop_name;
        auto prop = property_from_string(prop_name);
        const auto& obj = state_.objects.at(arg(slot));
        if (!prop || !obj.properties.count(*prop)) {
            return StepOutcome::exec_failed(
                "MissingProperty", prefix + render_plain(arg(slot)) + " is not " + prop_name);
        }
        return StepOutcome::success();
    }
    if (op == "reachable") {
        int slot = read_slot();
        if (!reachable(arg(slot))) {
            return StepOutcome::exec_failed(
                "NotCloseEnough", prefix + "the agent is not close to " + render_plain(arg(slot)));
        }
        return StepOutcome::success();
    }
    if (op == "container_open") {
        int slot = read_slot();
        auto container = state_.container_of(arg(slot));
        if (container && state_.has_state(*container, BinState::CLOSED)) {
            return StepOutcome::exec_failed(
                "ContainerClosed", prefix + render_plain(arg(slot)) + " is inside " +
                                       render_plain(*container) + ", which is CLOSED");
        }
        return StepOutcome::success();
    }
    if (op == "container_ready") {
        int slot = read_slot();
        const ObjectRef& target = arg(slot);
        if (state_.has_state(target, BinState::CLOSED)) {
            return StepOutcome::exec_failed(
                "ContainerClosed", prefix + render_plain(target) + " is CLOSED");
        }
        return StepOutcome::success();
    }
    if (op == "free_hand") {
        if (state_.agent.left_hand && state_.agent.right_hand) {
            return StepOutcome::exec_failed("HandsFull", prefix + "both hands are full");
        }
        return StepOutcome::success();
    }
    if (op == "holds") {
        int slot = read_slot();
        if (!state_.held(arg(slot))) {
            return StepOutcome::exec_failed(
                "HandsEmpty", prefix + "the agent is not holding " + render_plain(arg(slot)));
        }
        return StepOutcome::success();
    }
    if (op == "not_held") {
        int slot = read_slot();
        if (state_.held(arg(slot))) {
            return StepOutcome::exec_failed(
                "WrongStateTransition",
                prefix + "the agent is already holding " + render_plain(arg(slot)));
        }
        return StepOutcome::success();
    }
    if (op == "state") {
        int slot = read_slot();
        std::string state_name;
        iss >> state_name;
        auto want = state_from_string(state_name);
        if (!want || !state_.has_state(arg(slot), *want)) {
            std::string actual;
            auto it = state_.states.find(arg(slot));
            if (it != state_.states.end()) {
                for (BinState s : it->second) {
                    if (!actual.empty()) actual += ", ";
                    actual += to_string(s);
                }
            }
            return StepOutcome::exec_failed(
                "WrongStateTransition", prefix + render_plain(arg(slot)) + " is " +
                                            (actual.empty() ? "stateless" : actual) +
                                            "; it must be " + state_name);
        }
        return StepOutcome::success();
    }
    if (op == "closed_if_openable") {
        int slot = read_slot();
        const auto& obj = state_.objects.at(arg(slot));
        if (obj.properties.count(Property::OPENABLE) && !state_.has_state(arg(slot), BinState::CLOSED)) {
            return StepOutcome::exec_failed(
                "WrongStateTransition",
                prefix + render_plain(arg(slot)) + " is OPEN; it must be CLOSED first");
        }
        return StepOutcome::success();
    }
    if (op == "posture") {
        std::string want;
        iss >> want;
        Posture p = want == "SITTING" ? Posture::SITTING : Posture::STANDING;
        if (state_.agent.posture != p) {
            return StepOutcome::exec_failed(
                "WrongStateTransition", prefix + "the agent is not " + want);
        }
        return StepOutcome::success();
    }
    throw CatalogError("unknown precondition primitive: " + op);
}

void HouseholdEnv::apply_effect(const std::string& templ, const ActionStep& step) {
    std::istringstream iss(templ);
    std::string op;
    iss >> op;
    auto arg = [&](int slot) -> const ObjectRef& { return step.args.at(slot - 1); };
    auto read_slot = [&]() {
        int slot = 0;
        iss >> slot;
        return slot;
    };

    if (op == "goto") {
        state_.agent.location_anchor = arg(read_slot());
        return;
    }
    if (op == "take") {
        const ObjectRef& obj = arg(read_slot());
        for (auto it = state_.relations.begin(); it != state_.relations.end();) {
            if (it->subject == obj &&
                (it->relation == Relation::INSIDE || it->relation == Relation::ONTOP)) {
                it = state_.relations.erase(it);
            } else {
                ++it;
            }
        }
        if (!state_.agent.left_hand) {
            state_.agent.left_hand = obj;
        } else {
            state_.agent.right_hand = obj;
        }
        state_.relations.insert(RelationTriple{agent_ref(), Relation::HOLDS, obj});
        return;
    }
    if (op == "put_inside" || op == "put_onto") {
        const ObjectRef& obj = arg(read_slot());
        const ObjectRef& target = arg(read_slot());
        state_.relations.erase(RelationTriple{agent_ref(), Relation::HOLDS, obj});
        if (state_.agent.left_hand == obj) state_.agent.left_hand.reset();
        if (state_.agent.right_hand == obj) state_.agent.right_hand.reset();
        Relation rel = op == "put_inside" ? Relation::INSIDE : Relation::ONTOP;
        state_.relations.insert(RelationTriple::normalized(obj, rel, target));
        return;
    }
    if (op == "set_state") {
        const ObjectRef& obj = arg(read_slot());
        std::string state_name;
        iss >> state_name;
        auto s = state_from_string(state_name);
        if (!s) throw CatalogError("unknown state in effect: " + state_name);
        state_.states[obj].erase(complement(*s));
        state_.states[obj].insert(*s);
        return;
    }
    if (op == "sit") {
        state_.agent.posture = Posture::SITTING;
        return;
    }
    if (op == "stand") {
        state_.agent.posture = Posture::STANDING;
        return;
    }
    if (op == "noop") return;
    throw CatalogError("unknown effect primitive: " + op);
}

StepOutcome HouseholdEnv::execute(const ActionStep& step) {
    const CatalogEntry* entry = catalog_.find(step.verb);
    if (!entry || static_cast<int>(step.args.size()) != entry->arity) {
        StepOutcome out = StepOutcome::parse_failed("step is not valid against the catalog: " +
                                                    render_step(step));
        last_error_ = EnvError{out.error_code, out.error_message};
        return out;
    }
    for (const auto& ref : step.args) {
        if (!state_.objects.count(ref)) {
            StepOutcome out = StepOutcome::exec_failed(
                "UnknownObject", "cannot execute " + render_step(step) + ": no object " +
                                     render_plain(ref) + " in the scene");
            last_error_ = EnvError{out.error_code, out.error_message};
            return out;
        }
    }
    for (const auto& pre : entry->preconditions) {
        StepOutcome out = check_precondition(pre, step);
        if (!out.ok()) {
            last_error_ = EnvError{out.error_code, out.error_message};
            return out;
        }
    }
    // All preconditions hold; effects cannot fail, so the step is atomic.
    for (const auto& eff : entry->effects) {
        apply_effect(eff, step);
    }
    return StepOutcome::success();
}

Perception HouseholdEnv::perceive() {
    Perception p{state_.summary(), last_error_};
    last_error_.reset();
    return p;
}

StepOutcome HouseholdEnv::execute_command(const std::string& text) {
    TranslationResult parsed = parse_step(text, catalog_);
    if (const auto* err = std::get_if<ParseError>(&parsed)) {
        StepOutcome out = StepOutcome::parse_failed("malformed command \"" + text + "\": " + err->message);
        last_error_ = EnvError{out.error_code, out.error_message};
        return out;
    }
    if (std::holds_alternative<PassToken>(parsed)) {
        StepOutcome out = StepOutcome::parse_failed("the pass token is not an executable command");
        last_error_ = EnvError{out.error_code, out.error_message};
        return out;
    }
    return execute(std::get<ActionStep>(parsed));
}

}  // namespace taskloop::household
