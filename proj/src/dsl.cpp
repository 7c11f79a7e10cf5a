#include <algorithm>
#include <array>
#include <charconv>

#include "stagecheck/dsl.hpp"

namespace stagecheck::dsl {

std::string_view op_text(CompareOp op) {
    static constexpr std::array<std::string_view, 6> texts{"=", "!=", "<", "<=", ">", ">="};
    return texts[static_cast<std::size_t>(op)];
}

bool compare(double lhs, CompareOp op, double rhs) noexcept {
    switch (op) {
        case CompareOp::Eq: return lhs == rhs;
        case CompareOp::Ne: return lhs != rhs;
        case CompareOp::Lt: return lhs < rhs;
        case CompareOp::Le: return lhs <= rhs;
        case CompareOp::Gt: return lhs > rhs;
        case CompareOp::Ge: return lhs >= rhs;
    }
    return false;
}

bool is_var_compare(const Compare& c) noexcept {
    auto is_var = [](const Operand& o) {
        const auto* r = std::get_if<Read>(&o);
        return r && std::holds_alternative<VarRef>(r->ref);
    };
    return is_var(c.lhs) || is_var(c.rhs);
}

namespace {

std::string number_text(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string print(const Operand& o) {
    if (const auto* lit = std::get_if<Literal>(&o)) return number_text(lit->value);
    const auto& r = std::get<Read>(o);
    return (r.saved ? "SAVED " : "") + describe(r.ref);
}

struct ConditionPrinter {
    std::string operator()(const Always&) const { return "Always"; }
    std::string operator()(const Compare& c) const {
        return print(c.lhs) + " " + std::string(op_text(c.op)) + " " + print(c.rhs);
    }
    std::string operator()(const IsTouch& t) const { return "isTouch " + t.a + " " + t.b; }
    std::string operator()(const OnEdge& e) const {
        return "spriteOnEdge " + e.sprite + " " + std::string(side_name(e.side));
    }
    std::string operator()(const KeyDown& k) const { return "keyDown " + std::string(key_name(k.key)); }
    std::string operator()(const RandomCoin&) const { return "Random-True/False"; }
};

struct ItemPrinter {
    std::string operator()(const Nothing&) const { return "Nothing"; }
    std::string operator()(const Report& r) const {
        return "Report " + r.test_id + (r.success ? " SUCC" : " FAIL");
    }
    std::string operator()(const InputKey& in) const {
        std::string out = "Input " + std::string(key_name(in.key)) + " Key";
        if (in.steps != 1) out += " FOR " + std::to_string(in.steps) + " STEPS";
        return out;
    }
    std::string operator()(const AddTrigger& a) const { return "AddTrigger " + a.id; }
    std::string operator()(const RemoveTrigger& r) const { return "RemoveTrigger " + r.id; }
};

std::string print(const Condition& c) { return std::visit(ConditionPrinter{}, c); }
std::string print(const ActionItem& i) { return std::visit(ItemPrinter{}, i); }

std::string print(const Action& a) {
    if (const auto* d = std::get_if<Do>(&a)) return "DO " + print(d->item);
    const auto& ite = std::get<IfThenElse>(a);
    return "IF " + print(ite.cond) + " THEN " + print(ite.then_item) + " ELSE " + print(ite.else_item);
}

template <typename Fn>
void for_each_read(const Condition& c, Fn&& fn) {
    if (const auto* cmp = std::get_if<Compare>(&c)) {
        for (const Operand* o : {&cmp->lhs, &cmp->rhs})
            if (const auto* r = std::get_if<Read>(o)) fn(*r);
    }
}

void push_unique(std::vector<ValueRef>& out, const ValueRef& ref) {
    if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(ref);
}

}  // namespace

std::string pretty_print(const TriggerDef& def) {
    std::string out = "TRIGGER " + def.id + "\n  WHEN ";
    for (std::size_t i = 0; i < def.conditions.size(); ++i) {
        if (i) out += " AND ";
        out += print(def.conditions[i]);
    }
    out += "\n  AFTER " + std::to_string(def.delay_steps) + " STEPS\n";
    for (const auto& a : def.actions) out += "  THEN " + print(a) + "\n";
    std::vector<std::string> flags;
    if (def.flags.debounce) flags.emplace_back("debounce");
    if (def.flags.one_shot) flags.emplace_back("one-shot");
    if (def.flags.add_on_start) flags.emplace_back("add-on-start");
    if (!flags.empty()) {
        out += " ";
        for (const auto& f : flags) out += " " + f;
        out += "\n";
    }
    return out;
}

std::string pretty_print(const Suite& suite) {
    std::string out;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        if (i) out += "\n";
        out += pretty_print(suite[i]);
    }
    return out;
}

std::string Diagnostic::to_string() const {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
           (severity == Severity::Error ? "error" : "warning") + ": trigger '" + trigger +
           "': " + message;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::vector<Diagnostic> validate_suite(const Suite& suite, const Program& program) {
    std::vector<Diagnostic> out;
    for (const auto& def : suite) {
        auto error = [&](std::string message) {
            out.push_back(Diagnostic{Severity::Error, def.id, def.pos, std::move(message)});
        };
        auto sprite = [&](const std::string& name) {
            if (!program.find_sprite(name)) {
                error("unknown sprite '" + name + "'");
                return false;
            }
            return true;
        };
        auto check_read = [&](const Read& r) {
            if (const auto* p = std::get_if<PropRef>(&r.ref)) {
                sprite(p->sprite);
                return;
            }
            const auto& v = std::get<VarRef>(r.ref);
            if (v.sprite.empty()) {
                if (!program.globals.contains(v.name)) error("unknown variable '" + v.name + "'");
            } else if (sprite(v.sprite) && !program.find_sprite(v.sprite)->vars.contains(v.name)) {
                error("sprite '" + v.sprite + "' has no variable '" + v.name + "'");
            }
        };
        auto check_condition = [&](const Condition& c) {
            for_each_read(c, check_read);
            if (const auto* t = std::get_if<IsTouch>(&c)) {
                const bool both = sprite(t->a) & sprite(t->b);
                if (both && t->a == t->b) error("isTouch needs two different sprites");
            } else if (const auto* e = std::get_if<OnEdge>(&c)) {
                sprite(e->sprite);
            }
        };
        auto check_item = [&](const ActionItem& item) {
            const std::string* target = nullptr;
            if (const auto* a = std::get_if<AddTrigger>(&item)) target = &a->id;
            if (const auto* r = std::get_if<RemoveTrigger>(&item)) target = &r->id;
            if (target && std::none_of(suite.begin(), suite.end(),
                                       [&](const TriggerDef& d) { return d.id == *target; }))
                error("unknown trigger '" + *target + "'");
        };

        for (const auto& c : def.conditions) check_condition(c);
        for (const auto& a : def.actions) {
            if (const auto* d = std::get_if<Do>(&a)) {
                check_item(d->item);
            } else {
                const auto& ite = std::get<IfThenElse>(a);
                check_condition(ite.cond);
                check_item(ite.then_item);
                check_item(ite.else_item);
            }
        }
    }
    return out;
}

std::vector<ValueRef> saved_refs_in_actions(const TriggerDef& def) {
    std::vector<ValueRef> out;
    for (const auto& a : def.actions)
        if (const auto* ite = std::get_if<IfThenElse>(&a))
            for_each_read(ite->cond, [&](const Read& r) {
                if (r.saved) push_unique(out, r.ref);
            });
    return out;
}

std::vector<ValueRef> saved_refs_in_conditions(const TriggerDef& def) {
    std::vector<ValueRef> out;
    for (const auto& c : def.conditions)
        for_each_read(c, [&](const Read& r) {
            if (r.saved) push_unique(out, r.ref);
        });
    return out;
}

std::vector<std::string> report_test_ids(const Suite& suite) {
    std::vector<std::string> out;
    auto add = [&](const ActionItem& item) {
        if (const auto* r = std::get_if<Report>(&item))
            if (std::find(out.begin(), out.end(), r->test_id) == out.end()) out.push_back(r->test_id);
    };
    for (const auto& def : suite)
        for (const auto& a : def.actions) {
            if (const auto* d = std::get_if<Do>(&a)) {
                add(d->item);
            } else {
                const auto& ite = std::get<IfThenElse>(a);
                add(ite.then_item);
                add(ite.else_item);
            }
        }
    return out;
}

bool has_input_action(const TriggerDef& def) {
    auto is_input = [](const ActionItem& i) { return std::holds_alternative<InputKey>(i); };
    return std::any_of(def.actions.begin(), def.actions.end(), [&](const Action& a) {
        if (const auto* d = std::get_if<Do>(&a)) return is_input(d->item);
        const auto& ite = std::get<IfThenElse>(a);
        return is_input(ite.then_item) || is_input(ite.else_item);
    });
}

}  // namespace stagecheck::dsl
