#pragma once

#include "taskloop/environment.hpp"
#include "taskloop/grammar.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace taskloop::household {

enum class Property { SWITCHABLE, OPENABLE, GRABBABLE, CONTAINER, SURFACE, SITTABLE };
enum class BinState { ON, OFF, OPEN, CLOSED };
enum class Relation { INSIDE, ONTOP, CLOSE_TO, HOLDS };
enum class Posture { STANDING, SITTING };

std::string to_string(Property p);
std::string to_string(BinState s);
std::string to_string(Relation r);
std::optional<Property> property_from_string(const std::string& s);
std::optional<BinState> state_from_string(const std::string& s);
std::optional<Relation> relation_from_string(const std::string& s);

/// Sentinel subject/object for agent-centric relations (HOLDS).
const ObjectRef& agent_ref();

struct ObjectInstance {
    std::string name;
    int id = 0;
    std::set<Property> properties;

    ObjectRef ref() const { return ObjectRef{name, id}; }
};

/// CLOSE_TO is symmetric and stored normalized (smaller endpoint first).
struct RelationTriple {
    ObjectRef subject;
    Relation relation = Relation::CLOSE_TO;
    ObjectRef object;

    auto operator<=>(const RelationTriple&) const = default;

    static RelationTriple normalized(ObjectRef subject, Relation relation, ObjectRef object);
    std::string render() const;
};

struct AgentState {
    ObjectRef location_anchor;
    std::optional<ObjectRef> left_hand;
    std::optional<ObjectRef> right_hand;
    Posture posture = Posture::STANDING;
};

struct WorldState {
    std::map<ObjectRef, ObjectInstance> objects;
    std::map<ObjectRef, std::set<BinState>> states;
    std::set<RelationTriple> relations;
    AgentState agent;

    bool has_state(const ObjectRef& obj, BinState s) const;
    bool has_relation(const ObjectRef& subject, Relation r, const ObjectRef& object) const;
    std::optional<ObjectRef> container_of(const ObjectRef& obj) const;
    bool held(const ObjectRef& obj) const;

    /// Deterministic text form: sorted STATE lines, then REL lines, then the
    /// AGENT line. Identical states serialize identically.
    std::string summary() const;
};

/// One atomic goal condition: an object-state assertion or a relation
/// triple, possibly negated.
struct Condition {
    enum class Kind { State, Rel };
    bool positive = true;
    Kind kind = Kind::State;
    ObjectRef subject;
    BinState state = BinState::ON;       // Kind::State
    Relation relation = Relation::INSIDE;  // Kind::Rel
    ObjectRef object;                      // Kind::Rel

    auto operator<=>(const Condition&) const = default;

    std::string render() const;
};

using ConditionSet = std::set<Condition>;

struct SceneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UniverseMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownObjectError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Conditions present in `after` but not `before`, plus negations of those
/// removed. Both states must share one object universe.
ConditionSet state_diff(const WorldState& before, const WorldState& after);

struct ConditionPartition {
    ConditionSet satisfied;
    ConditionSet unsatisfied;
};

/// Partition `conds` by whether each holds in `state`.
ConditionPartition check_conditions(const WorldState& state, const ConditionSet& conds);

/// Deterministic household simulator. Actions are precondition-checked
/// against the active catalog; a failing step leaves the state untouched.
class HouseholdEnv final : public Environment {
public:
    /// Build from a JSON scene file; throws SceneError on the first
    /// violated invariant. Repeated loads of one spec are bit-identical.
    static std::unique_ptr<HouseholdEnv> load_scene(const std::string& path,
                                                    ActionCatalog catalog);
    static std::unique_ptr<HouseholdEnv> from_json_text(const std::string& text,
                                                        ActionCatalog catalog);

    StepOutcome execute(const ActionStep& step);

    Perception perceive() override;
    StepOutcome execute_command(const std::string& text) override;
    std::string serialize_state() const override { return state_.summary(); }

    const WorldState& state() const { return state_; }
    const ActionCatalog& catalog() const { return catalog_; }

private:
    HouseholdEnv(WorldState state, ActionCatalog catalog);

    StepOutcome check_precondition(const std::string& templ, const ActionStep& step);
    void apply_effect(const std::string& templ, const ActionStep& step);

    WorldState state_;
    ActionCatalog catalog_;
    std::optional<EnvError> last_error_;
};

}  // namespace taskloop::household
