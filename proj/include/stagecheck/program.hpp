#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stagecheck/stage.hpp"

namespace stagecheck {

enum class ExprKind : std::uint8_t {
    Number,
    Var,          // name (resolved local-first, see `scope`)
    Prop,         // sprite, prop
    Random,       // args[0], args[1]
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, Not,
    Touching,     // sprite
    TouchingEdge,
    KeyPressed,   // key
};

enum class VarScope : std::uint8_t { Global, Local };

struct Expr {
    ExprKind kind = ExprKind::Number;
    double number = 0.0;
    std::string name;    // variable name
    std::string sprite;  // property owner / touching target
    VarScope scope = VarScope::Global;
    Prop prop = Prop::X;
    Key key = Key::Space;
    bool integer_random = false;  // both bounds were integer literals
    std::vector<Expr> args;

    bool is_boolean() const noexcept;
    friend bool operator==(const Expr&, const Expr&) = default;
};

enum class BlockKind : std::uint8_t {
    Move, GlideTo, SetX, SetY, ChangeX, ChangeY, GoToXY, PointInDirection, TurnBy,
    IfOnEdgeBounce, Forever, Repeat, If, IfElse, WaitSteps, SetVar, ChangeVar,
    StopThisScript, StopAll,
};

std::string_view block_name(BlockKind kind);

struct Block {
    BlockKind kind = BlockKind::Move;
    std::vector<Expr> args;
    std::vector<Block> body;
    std::vector<Block> else_body;
    std::string var;  // SetVar / ChangeVar target
    VarScope scope = VarScope::Global;

    friend bool operator==(const Block&, const Block&) = default;
};

enum class HatKind : std::uint8_t { GreenFlag, KeyPressed };

struct Script {
    HatKind hat = HatKind::GreenFlag;
    Key key = Key::Space;
    std::vector<Block> body;
    friend bool operator==(const Script&, const Script&) = default;
};

struct SpriteDecl {
    std::string name;
    double x = 0, y = 0, direction = 90, width = 1, height = 1;
    std::map<std::string, double, std::less<>> vars;
    std::vector<Script> scripts;
    friend bool operator==(const SpriteDecl&, const SpriteDecl&) = default;
};

struct Program {
    std::string name;
    std::vector<SpriteDecl> sprites;
    std::map<std::string, double, std::less<>> globals;

    const SpriteDecl* find_sprite(std::string_view name) const noexcept;
    std::size_t script_count() const noexcept;
    friend bool operator==(const Program&, const Program&) = default;
};

inline constexpr std::string_view kProgramFormat = "stagecheck-program/1";

/// Parses and validates a program document (JSON, see corpus/schema/program.schema.json).
/// Throws ParseError, UnknownReference or TypeMismatch.
Program load_program(std::string_view document);
Program load_program_file(const std::filesystem::path& path);

}  // namespace stagecheck
