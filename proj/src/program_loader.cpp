#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stagecheck/errors.hpp"
#include "stagecheck/program.hpp"

namespace stagecheck {

using nlohmann::json;

bool Expr::is_boolean() const noexcept {
    switch (kind) {
        case ExprKind::Eq: case ExprKind::Ne: case ExprKind::Lt: case ExprKind::Le:
        case ExprKind::Gt: case ExprKind::Ge: case ExprKind::And: case ExprKind::Or:
        case ExprKind::Not: case ExprKind::Touching: case ExprKind::TouchingEdge:
        case ExprKind::KeyPressed:
            return true;
        default:
            return false;
    }
}

std::string_view block_name(BlockKind kind) {
    static constexpr std::array<std::string_view, 19> names{
        "move", "glide_to", "set_x", "set_y", "change_x", "change_y", "go_to",
        "point_in_direction", "turn", "if_on_edge_bounce", "forever", "repeat", "if",
        "if_else", "wait", "set_var", "change_var", "stop_this_script", "stop_all"};
    return names[static_cast<std::size_t>(kind)];
}

const SpriteDecl* Program::find_sprite(std::string_view name) const noexcept {
    for (const auto& s : sprites)
        if (s.name == name) return &s;
    return nullptr;
}

std::size_t Program::script_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sprites) n += s.scripts.size();
    return n;
}

namespace {

struct Loader {
    Program program;

    [[noreturn]] static void fail(const std::string& where, const std::string& message) {
        throw ParseError({}, (where.empty() ? "/" : where) + ": " + message);
    }

    static const json& member(const json& obj, const char* key, const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
        return *it;
    }

    static double number(const json& j, const std::string& where) {
        if (!j.is_number()) fail(where, "expected a number");
        return j.get<double>();
    }

    static std::string string(const json& j, const std::string& where) {
        if (!j.is_string()) fail(where, "expected a string");
        return j.get<std::string>();
    }

    static Key key(const json& j, const std::string& where) {
        auto text = string(j, where);
        auto k = parse_key(text);
        if (!k) fail(where, "unknown key '" + text + "'");
        return *k;
    }

    static void only_keys(const json& obj, std::initializer_list<const char*> allowed,
                          const std::string& where) {
        for (const auto& [k, v] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) fail(where, "unexpected key '" + k + "'");
        }
    }

    Expr expr(const json& j, const SpriteDecl& self, const std::string& where) {
        Expr e;
        if (j.is_number()) {
            e.kind = ExprKind::Number;
            e.number = j.get<double>();
            return e;
        }
        if (!j.is_object() || j.empty()) fail(where, "expected a number or an expression object");

        if (j.contains("prop")) {
            only_keys(j, {"prop", "of"}, where);
            auto name = string(j["prop"], where + "/prop");
            auto p = parse_prop(name);
            if (!p) fail(where + "/prop", "unknown property '" + name + "'");
            e.kind = ExprKind::Prop;
            e.prop = *p;
            e.sprite = j.contains("of") ? string(j["of"], where + "/of") : self.name;
            if (!program.find_sprite(e.sprite))
                throw UnknownReference(where + ": unknown sprite '" + e.sprite + "'");
            return e;
        }
        if (j.size() != 1) fail(where, "expression object must have exactly one key");
        const auto& [tag, arg] = *j.items().begin();
        const std::string sub = where + "/" + tag;

        static const std::map<std::string, ExprKind, std::less<>> binary{
            {"+", ExprKind::Add}, {"-", ExprKind::Sub}, {"*", ExprKind::Mul},
            {"/", ExprKind::Div}, {"=", ExprKind::Eq}, {"!=", ExprKind::Ne},
            {"<", ExprKind::Lt},  {"<=", ExprKind::Le}, {">", ExprKind::Gt},
            {">=", ExprKind::Ge}, {"and", ExprKind::And}, {"or", ExprKind::Or},
            {"random", ExprKind::Random}};

        if (tag == "var") {
            e.kind = ExprKind::Var;
            e.name = string(arg, sub);
            e.scope = resolve_var(e.name, self, sub);
            return e;
        }
        if (auto it = binary.find(tag); it != binary.end()) {
            if (!arg.is_array() || arg.size() != 2) fail(sub, "expected an array of two operands");
            e.kind = it->second;
            const bool logical = e.kind == ExprKind::And || e.kind == ExprKind::Or;
            for (std::size_t i = 0; i < 2; ++i) {
                auto operand = expr(arg[i], self, sub + "/" + std::to_string(i));
                if (operand.is_boolean() != logical)
                    throw TypeMismatch(sub + "/" + std::to_string(i) + ": expected a " +
                                       (logical ? "boolean" : "numeric") + " operand");
                e.args.push_back(std::move(operand));
            }
            if (e.kind == ExprKind::Random) {
                auto integral = [](const Expr& x) {
                    return x.kind == ExprKind::Number && std::floor(x.number) == x.number;
                };
                e.integer_random = integral(e.args[0]) && integral(e.args[1]);
            }
            return e;
        }
        if (tag == "not") {
            e.kind = ExprKind::Not;
            auto operand = expr(arg, self, sub);
            if (!operand.is_boolean()) throw TypeMismatch(sub + ": expected a boolean operand");
            e.args.push_back(std::move(operand));
            return e;
        }
        if (tag == "touching") {
            e.kind = ExprKind::Touching;
            e.sprite = string(arg, sub);
            if (!program.find_sprite(e.sprite))
                throw UnknownReference(sub + ": unknown sprite '" + e.sprite + "'");
            if (e.sprite == self.name) fail(sub, "a sprite cannot test touching itself");
            return e;
        }
        if (tag == "touching_edge") {
            e.kind = ExprKind::TouchingEdge;
            return e;
        }
        if (tag == "key_pressed") {
            e.kind = ExprKind::KeyPressed;
            e.key = key(arg, sub);
            return e;
        }
        fail(where, "unknown expression '" + tag + "'");
    }

    VarScope resolve_var(const std::string& name, const SpriteDecl& self, const std::string& where) {
        if (self.vars.contains(name)) return VarScope::Local;
        if (program.globals.contains(name)) return VarScope::Global;
        throw UnknownReference(where + ": unknown variable '" + name + "'");
    }

    Expr numeric(const json& obj, const char* key, const SpriteDecl& self, const std::string& where) {
        auto e = expr(member(obj, key, where), self, where + "/" + key);
        if (e.is_boolean()) throw TypeMismatch(where + "/" + key + ": expected a numeric expression");
        return e;
    }

    Expr boolean(const json& obj, const char* key, const SpriteDecl& self, const std::string& where) {
        auto e = expr(member(obj, key, where), self, where + "/" + key);
        if (!e.is_boolean()) throw TypeMismatch(where + "/" + key + ": expected a boolean expression");
        return e;
    }

    std::vector<Block> body(const json& j, const SpriteDecl& self, const std::string& where) {
        if (!j.is_array()) fail(where, "expected a list of blocks");
        std::vector<Block> out;
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(block(j[i], self, where + "/" + std::to_string(i)));
        return out;
    }

    Block block(const json& j, const SpriteDecl& self, const std::string& where) {
        if (!j.is_object()) fail(where, "expected a block object");
        auto op = string(member(j, "op", where), where + "/op");
        Block b;
        auto take = [&](std::initializer_list<const char*> keys, BlockKind kind) {
            std::vector<const char*> allowed{"op"};
            allowed.insert(allowed.end(), keys.begin(), keys.end());
            for (const auto& [k, v] : j.items()) {
                bool ok = false;
                for (const char* a : allowed) ok = ok || k == a;
                if (!ok) fail(where, "unexpected key '" + k + "' for block '" + op + "'");
            }
            b.kind = kind;
            for (const char* k : keys) {
                std::string_view name = k;
                if (name == "body" || name == "then" || name == "else" || name == "var" ||
                    name == "cond")
                    continue;
                b.args.push_back(numeric(j, k, self, where));
            }
        };

        if (op == "move") take({"steps"}, BlockKind::Move);
        else if (op == "glide_to") take({"x", "y", "steps"}, BlockKind::GlideTo);
        else if (op == "set_x") take({"value"}, BlockKind::SetX);
        else if (op == "set_y") take({"value"}, BlockKind::SetY);
        else if (op == "change_x") take({"by"}, BlockKind::ChangeX);
        else if (op == "change_y") take({"by"}, BlockKind::ChangeY);
        else if (op == "go_to") take({"x", "y"}, BlockKind::GoToXY);
        else if (op == "point_in_direction") take({"value"}, BlockKind::PointInDirection);
        else if (op == "turn") take({"degrees"}, BlockKind::TurnBy);
        else if (op == "if_on_edge_bounce") take({}, BlockKind::IfOnEdgeBounce);
        else if (op == "wait") take({"steps"}, BlockKind::WaitSteps);
        else if (op == "stop_this_script") take({}, BlockKind::StopThisScript);
        else if (op == "stop_all") take({}, BlockKind::StopAll);
        else if (op == "forever") {
            take({"body"}, BlockKind::Forever);
            b.body = body(member(j, "body", where), self, where + "/body");
        } else if (op == "repeat") {
            take({"times", "body"}, BlockKind::Repeat);
            b.body = body(member(j, "body", where), self, where + "/body");
        } else if (op == "if") {
            take({"cond", "then"}, BlockKind::If);
            b.args.push_back(boolean(j, "cond", self, where));
            b.body = body(member(j, "then", where), self, where + "/then");
        } else if (op == "if_else") {
            take({"cond", "then", "else"}, BlockKind::IfElse);
            b.args.push_back(boolean(j, "cond", self, where));
            b.body = body(member(j, "then", where), self, where + "/then");
            b.else_body = body(member(j, "else", where), self, where + "/else");
        } else if (op == "set_var" || op == "change_var") {
            const bool set = op == "set_var";
            take({"var", set ? "value" : "by"}, set ? BlockKind::SetVar : BlockKind::ChangeVar);
            b.var = string(member(j, "var", where), where + "/var");
            b.scope = resolve_var(b.var, self, where + "/var");
        } else {
            fail(where + "/op", "unknown block '" + op + "'");
        }
        return b;
    }

    Script script(const json& j, const SpriteDecl& self, const std::string& where) {
        if (!j.is_object()) fail(where, "expected a script object");
        only_keys(j, {"hat", "key", "body"}, where);
        Script s;
        auto hat = string(member(j, "hat", where), where + "/hat");
        if (hat == "when_green_flag") {
            s.hat = HatKind::GreenFlag;
            if (j.contains("key")) fail(where, "'key' is only valid for when_key_pressed");
        } else if (hat == "when_key_pressed") {
            s.hat = HatKind::KeyPressed;
            s.key = key(member(j, "key", where), where + "/key");
        } else {
            fail(where + "/hat", "unknown hat '" + hat + "'");
        }
        s.body = body(member(j, "body", where), self, where + "/body");
        if (s.body.empty()) fail(where + "/body", "script body must not be empty");
        return s;
    }

    void load(const json& doc) {
        if (!doc.is_object()) fail("", "expected a JSON object");
        only_keys(doc, {"format", "name", "stage"}, "");
        if (doc.contains("format") && string(doc["format"], "/format") != kProgramFormat)
            fail("/format", "unsupported format (expected " + std::string(kProgramFormat) + ")");
        if (doc.contains("name")) program.name = string(doc["name"], "/name");
        const auto& stage = member(doc, "stage", "");
        if (!stage.is_object()) fail("/stage", "expected an object");
        only_keys(stage, {"globals", "sprites"}, "/stage");

        if (stage.contains("globals")) {
            const auto& g = stage["globals"];
            if (!g.is_object()) fail("/stage/globals", "expected an object");
            for (const auto& [k, v] : g.items())
                program.globals[k] = number(v, "/stage/globals/" + k);
        }

        const auto& sprites = member(stage, "sprites", "/stage");
        if (!sprites.is_array()) fail("/stage/sprites", "expected a list");
        // Declarations first so scripts can reference sprites declared later.
        for (std::size_t i = 0; i < sprites.size(); ++i) {
            const std::string where = "/stage/sprites/" + std::to_string(i);
            const auto& sj = sprites[i];
            if (!sj.is_object()) fail(where, "expected a sprite object");
            only_keys(sj, {"name", "x", "y", "direction", "width", "height", "vars", "scripts"}, where);
            SpriteDecl d;
            d.name = string(member(sj, "name", where), where + "/name");
            if (program.find_sprite(d.name)) fail(where + "/name", "duplicate sprite '" + d.name + "'");
            auto opt = [&](const char* k, double fallback) {
                return sj.contains(k) ? number(sj[k], where + "/" + k) : fallback;
            };
            d.x = opt("x", 0);
            d.y = opt("y", 0);
            d.direction = normalize_direction(opt("direction", 90));
            d.width = opt("width", 1);
            d.height = opt("height", 1);
            if (!(d.width > 0) || !(d.height > 0)) fail(where, "width and height must be positive");
            if (sj.contains("vars")) {
                if (!sj["vars"].is_object()) fail(where + "/vars", "expected an object");
                for (const auto& [k, v] : sj["vars"].items())
                    d.vars[k] = number(v, where + "/vars/" + k);
            }
            program.sprites.push_back(std::move(d));
        }
        for (std::size_t i = 0; i < sprites.size(); ++i) {
            const std::string where = "/stage/sprites/" + std::to_string(i);
            if (!sprites[i].contains("scripts")) continue;
            const auto& scripts = sprites[i]["scripts"];
            if (!scripts.is_array()) fail(where + "/scripts", "expected a list");
            auto& self = program.sprites[i];
            for (std::size_t k = 0; k < scripts.size(); ++k)
                self.scripts.push_back(script(scripts[k], self, where + "/scripts/" + std::to_string(k)));
        }
    }
};

SourcePos offset_to_pos(std::string_view text, std::size_t offset) {
    SourcePos pos{1, 1};
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++pos.line;
            pos.column = 1;
        } else {
            ++pos.column;
        }
    }
    return pos;
}

}  // namespace

Program load_program(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(offset_to_pos(document, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    Loader loader;
    loader.load(doc);
    return std::move(loader.program);
}

Program load_program_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open program file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto program = load_program(buf.str());
    if (program.name.empty()) program.name = path.stem().string();
    return program;
}

}  // namespace stagecheck
