#pragma once

#include "taskloop/environment.hpp"
#include "taskloop/grammar.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace taskloop::tabletop {

enum class Shape { CUBE, CYLINDER };
enum class Region { LEFT_HALF, RIGHT_HALF, CENTER_BAND };

std::string to_string(Shape s);
std::string to_string(Region r);
std::optional<Shape> shape_from_string(const std::string& s);
std::optional<Region> region_from_string(const std::string& s);

struct Cell {
    int col = 0;
    int row = 0;

    auto operator<=>(const Cell&) const = default;

    std::string render() const;  // "(col, row)"
};

struct TabletopObject {
    std::string name;  // lowercase identifier, e.g. red_cube
    int id = 1;
    Shape shape = Shape::CUBE;
    std::string color;
    std::optional<Cell> cell;  // nullopt while held by the gripper

    ObjectRef ref() const { return ObjectRef{name, id}; }
};

/// Selects scene objects by shape and/or color; empty filters match all.
struct ObjectFilter {
    std::set<Shape> shapes;         // empty: any shape
    std::set<std::string> colors;   // empty: any color

    bool matches(const TabletopObject& obj) const;
};

struct InRegion {
    ObjectFilter filter;
    Region region = Region::LEFT_HALF;
};
/// Holds iff some translation of the offset template maps exactly onto the
/// filtered objects' cells.
struct PatternMatch {
    ObjectFilter filter;
    std::vector<Cell> offsets;
};
/// Filtered objects sorted along the axis must follow the visible-spectrum
/// color order (red < orange < yellow < green < blue < indigo < violet).
struct OrderedAlong {
    ObjectFilter filter;
    char axis = 'x';
};
struct CountInRegion {
    ObjectFilter filter;
    Region region = Region::LEFT_HALF;
    int count = 0;
};
/// All objects of `shape` are in `region`, and no other shape is.
struct Segregated {
    Shape shape = Shape::CUBE;
    Region region = Region::LEFT_HALF;
};

using GoalConjunct = std::variant<InRegion, PatternMatch, OrderedAlong, CountInRegion, Segregated>;

struct GoalPredicate {
    std::vector<GoalConjunct> conjuncts;
};

struct PickCommand {
    ObjectRef object;
};
struct PlaceCommand {
    Cell cell;
};
struct HomeCommand {};

using ArmCommand = std::variant<PickCommand, PlaceCommand, HomeCommand>;

/// Arm command grammar: `[PICK] <name> (id)`, `[PLACE] (col, row)`,
/// `[HOME]`, or the shared `[Pass]` token.
using ArmParseResult = std::variant<ArmCommand, PassToken, ParseError>;
ArmParseResult parse_arm_command(const std::string& text);
std::string render_arm_command(const ArmCommand& cmd);

struct SceneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic grid pick-and-place simulator. The reachability mask is
/// hidden from perception and surfaces only through Unreachable errors.
class TabletopEnv final : public Environment {
public:
    static std::unique_ptr<TabletopEnv> load(const std::string& path);
    static std::unique_ptr<TabletopEnv> from_json_text(const std::string& text);

    StepOutcome execute(const ArmCommand& cmd);

    Perception perceive() override;
    StepOutcome execute_command(const std::string& text) override;
    std::string serialize_state() const override;

    bool check_goal() const { return check_goal(goal_); }
    bool check_goal(const GoalPredicate& goal) const;

    bool in_region(const Cell& cell, Region region) const;

    int grid_width() const { return width_; }
    int grid_height() const { return height_; }
    const std::string& description() const { return description_; }
    const std::string& difficulty() const { return difficulty_; }
    const GoalPredicate& goal() const { return goal_; }
    const std::vector<std::string>& reference_commands() const { return reference_commands_; }
    const std::vector<std::string>& naive_commands() const { return naive_commands_; }
    bool declares_unreachable() const { return !unreachable_cells_.empty(); }

private:
    TabletopEnv() = default;

    const TabletopObject* find_object(const ObjectRef& ref) const;
    TabletopObject* find_object(const ObjectRef& ref);
    const TabletopObject* object_at(const Cell& cell) const;
    bool reachable(const Cell& cell) const;

    int width_ = 9;
    int height_ = 5;
    std::vector<TabletopObject> objects_;
    std::set<Cell> unreachable_cells_;
    std::optional<ObjectRef> gripper_;
    GoalPredicate goal_;
    std::string description_;
    std::string difficulty_;
    std::vector<std::string> reference_commands_;
    std::vector<std::string> naive_commands_;
    std::optional<EnvError> last_error_;
};

/// Position of a color in the visible spectrum, or nullopt for non-spectral
/// colors such as pink.
std::optional<int> spectral_rank(const std::string& color);

}  // namespace taskloop::tabletop
