#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stagecheck/errors.hpp"
#include "stagecheck/program.hpp"
#include "stagecheck/stage.hpp"

namespace stagecheck::dsl {

enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view op_text(CompareOp op);
bool compare(double lhs, CompareOp op, double rhs) noexcept;

// Operand of a comparison: a literal, or a live / SAVED read of a property or
// variable.
struct Literal {
    double value = 0.0;
    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Read {
    ValueRef ref;
    bool saved = false;
    friend bool operator==(const Read&, const Read&) = default;
};

using Operand = std::variant<Literal, Read>;

struct Always {
    friend bool operator==(const Always&, const Always&) = default;
};

// Covers both property and variable comparisons; which one a node is follows
// from its operands (see is_var_compare).
struct Compare {
    Operand lhs;
    CompareOp op = CompareOp::Eq;
    Operand rhs;
    friend bool operator==(const Compare&, const Compare&) = default;
};

struct IsTouch {
    std::string a, b;
    friend bool operator==(const IsTouch&, const IsTouch&) = default;
};

struct OnEdge {
    std::string sprite;
    Side side = Side::Any;
    friend bool operator==(const OnEdge&, const OnEdge&) = default;
};

struct KeyDown {
    Key key = Key::Space;
    friend bool operator==(const KeyDown&, const KeyDown&) = default;
};

struct RandomCoin {
    friend bool operator==(const RandomCoin&, const RandomCoin&) = default;
};

using Condition = std::variant<Always, Compare, IsTouch, OnEdge, KeyDown, RandomCoin>;

bool is_var_compare(const Compare& c) noexcept;

struct Nothing {
    friend bool operator==(const Nothing&, const Nothing&) = default;
};

struct Report {
    std::string test_id;
    bool success = true;
    friend bool operator==(const Report&, const Report&) = default;
};

struct InputKey {
    Key key = Key::Space;
    int steps = 1;
    friend bool operator==(const InputKey&, const InputKey&) = default;
};

struct AddTrigger {
    std::string id;
    friend bool operator==(const AddTrigger&, const AddTrigger&) = default;
};

struct RemoveTrigger {
    std::string id;
    friend bool operator==(const RemoveTrigger&, const RemoveTrigger&) = default;
};

using ActionItem = std::variant<Nothing, Report, InputKey, AddTrigger, RemoveTrigger>;

struct Do {
    ActionItem item;
    friend bool operator==(const Do&, const Do&) = default;
};

struct IfThenElse {
    Condition cond;
    ActionItem then_item;
    ActionItem else_item;
    friend bool operator==(const IfThenElse&, const IfThenElse&) = default;
};

using Action = std::variant<Do, IfThenElse>;

struct Flags {
    bool debounce = false;
    bool one_shot = false;
    bool add_on_start = false;
    friend bool operator==(const Flags&, const Flags&) = default;
};

struct TriggerDef {
    std::string id;
    std::vector<Condition> conditions;  // conjunction
    int delay_steps = 0;
    std::vector<Action> actions;
    Flags flags;
    SourcePos pos;  // not part of structural equality

    friend bool operator==(const TriggerDef& a, const TriggerDef& b) {
        return a.id == b.id && a.conditions == b.conditions && a.delay_steps == b.delay_steps &&
               a.actions == b.actions && a.flags == b.flags;
    }
};

using Suite = std::vector<TriggerDef>;

/// Parses one or more TRIGGER blocks. Throws ParseError / DuplicateTriggerId.
Suite parse_suite(std::string_view text);
Suite parse_suite_file(const std::filesystem::path& path);

std::string pretty_print(const TriggerDef& def);
std::string pretty_print(const Suite& suite);

enum class Severity : std::uint8_t { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string trigger;
    SourcePos pos;
    std::string message;

    std::string to_string() const;
};

std::vector<Diagnostic> validate_suite(const Suite& suite, const Program& program);
bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept;

// Reference-collection helpers shared by the harness and the validator.
std::vector<ValueRef> saved_refs_in_actions(const TriggerDef& def);
std::vector<ValueRef> saved_refs_in_conditions(const TriggerDef& def);
std::vector<std::string> report_test_ids(const Suite& suite);
bool has_input_action(const TriggerDef& def);

}  // namespace stagecheck::dsl
