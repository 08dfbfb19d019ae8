#include "taskloop/tabletop.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace taskloop::tabletop {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneError("cannot open tabletop spec: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

Cell cell_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw SceneError("cells must be [col, row] pairs");
    return Cell{j[0].get<int>(), j[1].get<int>()};
}

ObjectFilter filter_from_json(const json& j) {
    ObjectFilter f;
    for (const auto& s : j.value("shapes", json::array())) {
        auto shape = shape_from_string(s.get<std::string>());
        if (!shape) throw SceneError("unknown shape in filter: " + s.get<std::string>());
        f.shapes.insert(*shape);
    }
    for (const auto& c : j.value("colors", json::array())) {
        f.colors.insert(c.get<std::string>());
    }
    return f;
}

Region region_from_json(const json& j) {
    auto r = region_from_string(j.get<std::string>());
    if (!r) throw SceneError("unknown region: " + j.get<std::string>());
    return *r;
}

GoalConjunct conjunct_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "in_region") {
        return InRegion{filter_from_json(j.value("filter", json::object())), region_from_json(j.at("region"))};
    }
    if (type == "pattern") {
        PatternMatch pm;
        pm.filter = filter_from_json(j.value("filter", json::object()));
        for (const auto& o : j.at("offsets")) pm.offsets.push_back(cell_from_json(o));
        return pm;
    }
    if (type == "ordered") {
        OrderedAlong oa;
        oa.filter = filter_from_json(j.value("filter", json::object()));
        oa.axis = j.value("axis", std::string("x"))[0];
        return oa;
    }
    if (type == "count") {
        CountInRegion c;
        c.filter = filter_from_json(j.value("filter", json::object()));
        c.region = region_from_json(j.at("region"));
        c.count = j.at("count").get<int>();
        return c;
    }
    if (type == "segregated") {
        Segregated s;
        auto shape = shape_from_string(j.at("shape").get<std::string>());
        if (!shape) throw SceneError("unknown shape: " + j.at("shape").get<std::string>());
        s.shape = *shape;
        s.region = region_from_json(j.at("region"));
        return s;
    }
    throw SceneError("unknown goal conjunct type: " + type);
}

const ObjectFilter* conjunct_filter(const GoalConjunct& c) {
    if (const auto* x = std::get_if<InRegion>(&c)) return &x->filter;
    if (const auto* x = std::get_if<PatternMatch>(&c)) return &x->filter;
    if (const auto* x = std::get_if<OrderedAlong>(&c)) return &x->filter;
    if (const auto* x = std::get_if<CountInRegion>(&c)) return &x->filter;
    return nullptr;
}

}  // namespace

std::string to_string(Shape s) {
    return s == Shape::CUBE ? "CUBE" : "CYLINDER";
}

std::string to_string(Region r) {
    switch (r) {
        case Region::LEFT_HALF: return "LEFT_HALF";
        case Region::RIGHT_HALF: return "RIGHT_HALF";
        case Region::CENTER_BAND: return "CENTER_BAND";
    }
    return "?";
}

std::optional<Shape> shape_from_string(const std::string& s) {
    if (s == "CUBE") return Shape::CUBE;
    if (s == "CYLINDER") return Shape::CYLINDER;
    return std::nullopt;
}

std::optional<Region> region_from_string(const std::string& s) {
    if (s == "LEFT_HALF") return Region::LEFT_HALF;
    if (s == "RIGHT_HALF") return Region::RIGHT_HALF;
    if (s == "CENTER_BAND") return Region::CENTER_BAND;
    return std::nullopt;
}

std::string Cell::render() const {
    return "(" + std::to_string(col) + ", " + std::to_string(row) + ")";
}

bool ObjectFilter::matches(const TabletopObject& obj) const {
    if (!shapes.empty() && !shapes.count(obj.shape)) return false;
    if (!colors.empty() && !colors.count(obj.color)) return false;
    return true;
}

std::optional<int> spectral_rank(const std::string& color) {
    static const std::vector<std::string> order = {"red",  "orange", "yellow", "green",
                                                   "blue", "indigo", "violet"};
    for (size_t i = 0; i < order.size(); ++i) {
        if (order[i] == color) return static_cast<int>(i);
    }
    return std::nullopt;
}

ArmParseResult parse_arm_command(const std::string& text) {
    // Reuse the bracket-verb surface of the primitive grammar with a local
    // catalog so `[PICK] <red_cube> (1)` parses as a regular step.
    static const ActionCatalog arm_catalog = [] {
        ActionCatalog c;
        c.add("PICK", CatalogEntry{1, {}, {}});
        c.add("HOME", CatalogEntry{0, {}, {}});
        return c;
    }();

    // [PLACE] (col, row) has a coordinate argument the shared grammar does
    // not cover; handle it here.
    std::string trimmed = text;
    auto first = trimmed.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return ParseError{ParseError::Reason::Malformed, "empty command"};
    }
    trimmed = trimmed.substr(first);
    if (to_upper(trimmed).rfind("[PLACE]", 0) == 0) {
        std::string rest = trimmed.substr(7);
        int col = 0, row = 0;
        char open = 0, comma = 0, close = 0;
        std::istringstream iss(rest);
        iss >> open >> col >> comma >> row >> close;
        bool shape_ok = !iss.fail();
        std::string tail;
        iss >> tail;
        if (!shape_ok || open != '(' || comma != ',' || close != ')' || !tail.empty()) {
            return ParseError{ParseError::Reason::Malformed,
                              "[PLACE] expects a (col, row) cell: " + text};
        }
        return ArmCommand{PlaceCommand{Cell{col, row}}};
    }

    TranslationResult parsed = parse_step(text, arm_catalog);
    if (const auto* err = std::get_if<ParseError>(&parsed)) return *err;
    if (std::holds_alternative<PassToken>(parsed)) return PassToken{};
    const auto& step = std::get<ActionStep>(parsed);
    if (step.verb == "PICK") return ArmCommand{PickCommand{step.args[0]}};
    return ArmCommand{HomeCommand{}};
}

std::string render_arm_command(const ArmCommand& cmd) {
    if (const auto* pick = std::get_if<PickCommand>(&cmd)) {
        return "[PICK] " + pick->object.render();
    }
    if (const auto* place = std::get_if<PlaceCommand>(&cmd)) {
        return "[PLACE] " + place->cell.render();
    }
    return "[HOME]";
}

std::unique_ptr<TabletopEnv> TabletopEnv::load(const std::string& path) {
    return from_json_text(read_file(path));
}

std::unique_ptr<TabletopEnv> TabletopEnv::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SceneError(std::string("tabletop spec is not valid JSON: ") + e.what());
    }

    auto env = std::unique_ptr<TabletopEnv>(new TabletopEnv());
    if (doc.contains("grid")) {
        env->width_ = doc["grid"].value("width", 9);
        env->height_ = doc["grid"].value("height", 5);
    }
    if (env->width_ <= 0 || env->height_ <= 0) throw SceneError("grid must be non-empty");

    for (const auto& obj : doc.value("objects", json::array())) {
        TabletopObject o;
        o.name = obj.at("name").get<std::string>();
        o.id = obj.value("id", 1);
        auto shape = shape_from_string(obj.at("shape").get<std::string>());
        if (!shape) throw SceneError("unknown shape: " + obj.at("shape").get<std::string>());
        o.shape = *shape;
        o.color = obj.at("color").get<std::string>();
        o.cell = cell_from_json(obj.at("cell"));
        if (o.cell->col < 0 || o.cell->col >= env->width_ || o.cell->row < 0 ||
            o.cell->row >= env->height_) {
            throw SceneError(o.name + " starts outside the grid");
        }
        for (const auto& other : env->objects_) {
            if (other.ref() == o.ref()) throw SceneError("duplicate object: " + o.name);
            if (other.cell == o.cell) {
                throw SceneError("two objects on one cell " + o.cell->render());
            }
        }
        env->objects_.push_back(std::move(o));
    }
    std::sort(env->objects_.begin(), env->objects_.end(),
              [](const TabletopObject& a, const TabletopObject& b) { return a.ref() < b.ref(); });

    for (const auto& c : doc.value("unreachable_cells", json::array())) {
        Cell cell = cell_from_json(c);
        if (cell.col < 0 || cell.col >= env->width_ || cell.row < 0 || cell.row >= env->height_) {
            throw SceneError("unreachable cell outside the grid: " + cell.render());
        }
        env->unreachable_cells_.insert(cell);
    }

    if (doc.contains("goal")) {
        for (const auto& c : doc["goal"].value("all", json::array())) {
            env->goal_.conjuncts.push_back(conjunct_from_json(c));
        }
        // Every filter must select at least one scene object.
        for (const auto& conjunct : env->goal_.conjuncts) {
            const ObjectFilter* filter = conjunct_filter(conjunct);
            if (!filter) continue;
            bool any = std::any_of(env->objects_.begin(), env->objects_.end(),
                                   [&](const TabletopObject& o) { return filter->matches(o); });
            if (!any) throw SceneError("goal filter matches no scene object");
        }
    }

    env->description_ = doc.value("description", std::string());
    env->difficulty_ = doc.value("difficulty", std::string());
    for (const auto& c : doc.value("reference_commands", json::array())) {
        env->reference_commands_.push_back(c.get<std::string>());
    }
    for (const auto& c : doc.value("naive_commands", json::array())) {
        env->naive_commands_.push_back(c.get<std::string>());
    }
    return env;
}

const TabletopObject* TabletopEnv::find_object(const ObjectRef& ref) const {
    for (const auto& o : objects_) {
        if (o.ref() == ref) return &o;
    }
    return nullptr;
}

TabletopObject* TabletopEnv::find_object(const ObjectRef& ref) {
    return const_cast<TabletopObject*>(std::as_const(*this).find_object(ref));
}

const TabletopObject* TabletopEnv::object_at(const Cell& cell) const {
    for (const auto& o : objects_) {
        if (o.cell == cell) return &o;
    }
    return nullptr;
}

bool TabletopEnv::reachable(const Cell& cell) const {
    if (cell.col < 0 || cell.col >= width_ || cell.row < 0 || cell.row >= height_) return false;
    return !unreachable_cells_.count(cell);
}

bool TabletopEnv::in_region(const Cell& cell, Region region) const {
    switch (region) {
        case Region::LEFT_HALF: return cell.col < width_ / 2;
        case Region::RIGHT_HALF: return cell.col > (width_ - 1) / 2;
        case Region::CENTER_BAND: return cell.row == height_ / 2;
    }
    return false;
}

StepOutcome TabletopEnv::execute(const ArmCommand& cmd) {
    auto fail = [&](std::string code, std::string message) {
        StepOutcome out = StepOutcome::exec_failed(std::move(code), std::move(message));
        last_error_ = EnvError{out.error_code, out.error_message};
        return out;
    };

    if (const auto* pick = std::get_if<PickCommand>(&cmd)) {
        std::string prefix = "cannot execute " + render_arm_command(cmd) + ": ";
        TabletopObject* obj = find_object(pick->object);
        if (!obj) {
            return fail("UnknownObject", prefix + "no object " + pick->object.name + " (" +
                                             std::to_string(pick->object.instance_id) +
                                             ") in the scene");
        }
        if (gripper_) {
            return fail("GripperFull", prefix + "the gripper already holds " + gripper_->name +
                                           " (" + std::to_string(gripper_->instance_id) + ")");
        }
        if (!obj->cell) {
            return fail("GripperFull", prefix + "the object is already in the gripper");
        }
        if (!reachable(*obj->cell)) {
            return fail("Unreachable", prefix + "cell " + obj->cell->render() +
                                           " is outside the arm's workspace");
        }
        gripper_ = obj->ref();
        obj->cell.reset();
        return StepOutcome::success();
    }
    if (const auto* place = std::get_if<PlaceCommand>(&cmd)) {
        std::string prefix = "cannot execute " + render_arm_command(cmd) + ": ";
        if (!gripper_) {
            return fail("GripperEmpty", prefix + "the gripper is empty");
        }
        if (!reachable(place->cell)) {
            return fail("Unreachable", prefix + "cell " + place->cell.render() +
                                           " is outside the arm's workspace");
        }
        if (object_at(place->cell)) {
            return fail("CellOccupied", prefix + "cell " + place->cell.render() + " is occupied");
        }
        TabletopObject* obj = find_object(*gripper_);
        obj->cell = place->cell;
        gripper_.reset();
        return StepOutcome::success();
    }
    // HOME returns the arm to its rest pose; always succeeds.
    return StepOutcome::success();
}

std::string TabletopEnv::serialize_state() const {
    std::vector<std::string> lines;
    for (const auto& o : objects_) {
        if (!o.cell) continue;
        lines.push_back("OBJ " + o.color + " " + to_string(o.shape) + " (" + std::to_string(o.id) +
                        ") at " + o.cell->render());
    }
    std::sort(lines.begin(), lines.end());
    std::ostringstream out;
    for (const auto& l : lines) out << l << "\n";
    if (gripper_) {
        out << "GRIPPER holding " << gripper_->name << " (" << gripper_->instance_id << ")\n";
    } else {
        out << "GRIPPER empty\n";
    }
    return out.str();
}

Perception TabletopEnv::perceive() {
    Perception p{serialize_state(), last_error_};
    last_error_.reset();
    return p;
}

StepOutcome TabletopEnv::execute_command(const std::string& text) {
    ArmParseResult parsed = parse_arm_command(text);
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
    return execute(std::get<ArmCommand>(parsed));
}

bool TabletopEnv::check_goal(const GoalPredicate& goal) const {
    auto filtered_cells = [&](const ObjectFilter& filter) {
        std::vector<const TabletopObject*> out;
        for (const auto& o : objects_) {
            if (filter.matches(o)) out.push_back(&o);
        }
        return out;
    };

    for (const auto& conjunct : goal.conjuncts) {
        bool ok = true;
        if (const auto* in = std::get_if<InRegion>(&conjunct)) {
            for (const auto* o : filtered_cells(in->filter)) {
                if (!o->cell || !in_region(*o->cell, in->region)) {
                    ok = false;
                    break;
                }
            }
        } else if (const auto* pm = std::get_if<PatternMatch>(&conjunct)) {
            auto objs = filtered_cells(pm->filter);
            std::set<Cell> cells;
            for (const auto* o : objs) {
                if (!o->cell) {
                    cells.clear();
                    break;
                }
                cells.insert(*o->cell);
            }
            ok = false;
            if (cells.size() == pm->offsets.size() && !cells.empty()) {
                for (int dx = -width_; dx <= width_ && !ok; ++dx) {
                    for (int dy = -height_; dy <= height_ && !ok; ++dy) {
                        std::set<Cell> translated;
                        for (const auto& off : pm->offsets) {
                            translated.insert(Cell{off.col + dx, off.row + dy});
                        }
                        if (translated == cells) ok = true;
                    }
                }
            }
        } else if (const auto* oa = std::get_if<OrderedAlong>(&conjunct)) {
            auto objs = filtered_cells(oa->filter);
            std::sort(objs.begin(), objs.end(), [&](const TabletopObject* a, const TabletopObject* b) {
                if (!a->cell || !b->cell) return a->ref() < b->ref();
                return oa->axis == 'y' ? a->cell->row < b->cell->row : a->cell->col < b->cell->col;
            });
            int prev = -1;
            for (const auto* o : objs) {
                auto rank = o->cell ? spectral_rank(o->color) : std::nullopt;
                if (!rank || *rank <= prev) {
                    ok = false;
                    break;
                }
                prev = *rank;
            }
        } else if (const auto* cr = std::get_if<CountInRegion>(&conjunct)) {
            int n = 0;
            for (const auto* o : filtered_cells(cr->filter)) {
                if (o->cell && in_region(*o->cell, cr->region)) ++n;
            }
            ok = n == cr->count;
        } else if (const auto* seg = std::get_if<Segregated>(&conjunct)) {
            for (const auto& o : objects_) {
                bool inside = o.cell && in_region(*o.cell, seg->region);
                if (o.shape == seg->shape && !inside) ok = false;
                if (o.shape != seg->shape && inside) ok = false;
            }
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace taskloop::tabletop
