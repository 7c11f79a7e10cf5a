#include "stagecheck/vm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stagecheck {

std::size_t VmState::live_threads() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(slots.begin(), slots.end(), [](const ScriptSlot& s) { return s.thread.has_value(); }));
}

SpriteState bounce_if_on_edge(SpriteState s) {
    const bool crosses_vertical = s.left() < StageBounds::left || s.right() > StageBounds::right;
    const bool crosses_horizontal = s.bottom() < StageBounds::bottom || s.top() > StageBounds::top;
    if (!crosses_vertical && !crosses_horizontal) return s;

    double dir = s.direction();
    if (crosses_vertical) dir = -dir;
    if (crosses_horizontal) dir = 180.0 - dir;
    s.set_direction(dir);

    double x = s.x();
    double y = s.y();
    if (s.left() < StageBounds::left) x = StageBounds::left + s.width() / 2;
    else if (s.right() > StageBounds::right) x = StageBounds::right - s.width() / 2;
    if (s.bottom() < StageBounds::bottom) y = StageBounds::bottom + s.height() / 2;
    else if (s.top() > StageBounds::top) y = StageBounds::top - s.height() / 2;
    s.set_position(x, y);
    return s;
}

namespace {

struct Fault {
    std::string message;
};

enum class Outcome { Yield, Done, StopAll };

std::int64_t to_count(double value) {
    if (std::isnan(value)) return 0;
    return static_cast<std::int64_t>(std::llround(std::clamp(value, -1e15, 1e15)));
}

class Executor {
public:
    Executor(const Program& program, VmState& vm, const VmOptions& options, std::size_t sprite)
        : program_(program), vm_(vm), options_(options), sprite_(sprite) {}

    Outcome run(ThreadState& t) {
        if (vm_.stage.step_index < t.resume_at) return Outcome::Yield;
        if (t.glide) return advance_glide(t);

        int executed = 0;
        while (true) {
            if (t.frames.empty()) return Outcome::Done;
            Frame& f = t.frames.back();
            if (f.pc >= f.body->size()) {
                switch (f.loop) {
                    case Frame::Loop::None:
                        t.frames.pop_back();
                        if (t.frames.empty()) return Outcome::Done;
                        ++t.frames.back().pc;
                        continue;
                    case Frame::Loop::Forever:
                        f.pc = 0;
                        return Outcome::Yield;
                    case Frame::Loop::Repeat:
                        if (--f.remaining > 0) {
                            f.pc = 0;
                        } else {
                            t.frames.pop_back();
                            ++t.frames.back().pc;
                        }
                        return Outcome::Yield;
                }
            }

            if (++executed > options_.block_budget)
                throw Fault{"block budget of " + std::to_string(options_.block_budget) +
                            " exceeded in one step"};

            const Block& b = (*f.body)[f.pc];
            SpriteState& me = self();
            switch (b.kind) {
                case BlockKind::Move: {
                    const double n = eval(b.args[0]);
                    me.set_position(me.x() + n * sin_deg(me.direction()),
                                    me.y() + n * cos_deg(me.direction()));
                    ++f.pc;
                    break;
                }
                case BlockKind::GlideTo: {
                    const double tx = eval(b.args[0]);
                    const double ty = eval(b.args[1]);
                    const std::int64_t duration = to_count(eval(b.args[2]));
                    if (duration <= 0) {
                        me.set_position(tx, ty);
                        ++f.pc;
                        break;
                    }
                    t.glide = GlideState{me.x(), me.y(), tx, ty, duration, 0};
                    return advance_glide(t);
                }
                case BlockKind::SetX: me.set_x(eval(b.args[0])); ++f.pc; break;
                case BlockKind::SetY: me.set_y(eval(b.args[0])); ++f.pc; break;
                case BlockKind::ChangeX: me.set_x(me.x() + eval(b.args[0])); ++f.pc; break;
                case BlockKind::ChangeY: me.set_y(me.y() + eval(b.args[0])); ++f.pc; break;
                case BlockKind::GoToXY: {
                    const double x = eval(b.args[0]);
                    const double y = eval(b.args[1]);
                    me.set_position(x, y);
                    ++f.pc;
                    break;
                }
                case BlockKind::PointInDirection: me.set_direction(eval(b.args[0])); ++f.pc; break;
                case BlockKind::TurnBy: me.turn(eval(b.args[0])); ++f.pc; break;
                case BlockKind::IfOnEdgeBounce: me = bounce_if_on_edge(me); ++f.pc; break;
                case BlockKind::Forever:
                    t.frames.push_back(Frame{&b.body, 0, Frame::Loop::Forever, 0});
                    break;
                case BlockKind::Repeat: {
                    const std::int64_t n = to_count(eval(b.args[0]));
                    if (n <= 0) ++f.pc;
                    else t.frames.push_back(Frame{&b.body, 0, Frame::Loop::Repeat, n});
                    break;
                }
                case BlockKind::If:
                    if (test(b.args[0])) t.frames.push_back(Frame{&b.body, 0, Frame::Loop::None, 0});
                    else ++f.pc;
                    break;
                case BlockKind::IfElse: {
                    const auto* branch = test(b.args[0]) ? &b.body : &b.else_body;
                    t.frames.push_back(Frame{branch, 0, Frame::Loop::None, 0});
                    break;
                }
                case BlockKind::WaitSteps: {
                    const std::int64_t n = to_count(eval(b.args[0]));
                    ++f.pc;
                    if (n >= 1) {
                        t.resume_at = vm_.stage.step_index + n;
                        return Outcome::Yield;
                    }
                    break;
                }
                case BlockKind::SetVar: var(b.var, b.scope) = eval(b.args[0]); ++f.pc; break;
                case BlockKind::ChangeVar: {
                    const double by = eval(b.args[0]);
                    var(b.var, b.scope) += by;
                    ++f.pc;
                    break;
                }
                case BlockKind::StopThisScript: return Outcome::Done;
                case BlockKind::StopAll: return Outcome::StopAll;
            }
        }
    }

private:
    SpriteState& self() { return vm_.stage.sprites[sprite_]; }

    Outcome advance_glide(ThreadState& t) {
        GlideState& g = *t.glide;
        ++g.elapsed;
        SpriteState& me = self();
        if (g.elapsed >= g.duration) {
            me.set_position(g.target_x, g.target_y);
            t.glide.reset();
            ++t.frames.back().pc;
        } else {
            const double k = static_cast<double>(g.elapsed);
            const double d = static_cast<double>(g.duration);
            me.set_position(g.start_x + (g.target_x - g.start_x) * k / d,
                            g.start_y + (g.target_y - g.start_y) * k / d);
        }
        return Outcome::Yield;
    }

    double& var(const std::string& name, VarScope scope) {
        auto& vars = scope == VarScope::Local ? self().local_vars : vm_.stage.global_vars;
        return vars.find(name)->second;
    }

    bool test(const Expr& e) { return eval(e) != 0.0; }

    double eval(const Expr& e) {
        auto a = [&] { return eval(e.args[0]); };
        auto b = [&] { return eval(e.args[1]); };
        switch (e.kind) {
            case ExprKind::Number: return e.number;
            case ExprKind::Var: return var(e.name, e.scope);
            case ExprKind::Prop: return vm_.stage.sprite(e.sprite).property(e.prop);
            case ExprKind::Random: {
                const double lo = a();
                const double hi = b();
                if (lo > hi) throw Fault{"random range is empty (lo > hi)"};
                if (e.integer_random)
                    return static_cast<double>(vm_.stage.rng.next_int(static_cast<std::int64_t>(lo),
                                                                      static_cast<std::int64_t>(hi)));
                return vm_.stage.rng.next_real(lo, hi);
            }
            case ExprKind::Add: return a() + b();
            case ExprKind::Sub: return a() - b();
            case ExprKind::Mul: return a() * b();
            case ExprKind::Div: {
                const double num = a();
                const double den = b();
                if (den == 0.0) throw Fault{"division by zero"};
                return num / den;
            }
            case ExprKind::Eq: return a() == b();
            case ExprKind::Ne: return a() != b();
            case ExprKind::Lt: return a() < b();
            case ExprKind::Le: return a() <= b();
            case ExprKind::Gt: return a() > b();
            case ExprKind::Ge: return a() >= b();
            case ExprKind::And: return test(e.args[0]) && test(e.args[1]);
            case ExprKind::Or: return test(e.args[0]) || test(e.args[1]);
            case ExprKind::Not: return !test(e.args[0]);
            case ExprKind::Touching: return boxes_touch(self(), vm_.stage.sprite(e.sprite));
            case ExprKind::TouchingEdge: return box_on_edge(self(), Side::Any);
            case ExprKind::KeyPressed: return vm_.stage.keys_down.contains(e.key);
        }
        return 0.0;
    }

    const Program& program_;
    VmState& vm_;
    const VmOptions& options_;
    std::size_t sprite_;
};

ThreadState spawn(const Script& script) {
    ThreadState t;
    t.frames.push_back(Frame{&script.body, 0, Frame::Loop::None, 0});
    return t;
}

}  // namespace

VmState green_flag(const Program& program, std::uint64_t seed) {
    VmState vm;
    for (const auto& d : program.sprites) {
        SpriteState s(d.name, d.x, d.y, d.direction, d.width, d.height);
        s.local_vars = d.vars;
        vm.stage.sprites.push_back(std::move(s));
    }
    vm.stage.global_vars = program.globals;
    vm.stage.rng.reseed(seed);
    vm.stage.step_index = 0;
    for (std::size_t i = 0; i < program.sprites.size(); ++i) {
        const auto& scripts = program.sprites[i].scripts;
        for (std::size_t k = 0; k < scripts.size(); ++k) {
            ScriptSlot slot{i, k, std::nullopt};
            if (scripts[k].hat == HatKind::GreenFlag) slot.thread = spawn(scripts[k]);
            vm.slots.push_back(std::move(slot));
        }
    }
    vm.started = true;
    return vm;
}

void vm_step(const Program& program, VmState& vm, const VmOptions& options) {
    if (!vm.started) throw std::logic_error("vm_step called before green_flag");

    for (auto& slot : vm.slots) {
        const Script& script = program.sprites[slot.sprite].scripts[slot.script];
        if (script.hat == HatKind::KeyPressed && !slot.thread && vm.stage.keys_down.contains(script.key))
            slot.thread = spawn(script);
    }

    for (auto& slot : vm.slots) {
        if (!slot.thread) continue;
        Executor exec(program, vm, options, slot.sprite);
        Outcome outcome;
        try {
            outcome = exec.run(*slot.thread);
        } catch (const Fault& fault) {
            vm.faults.push_back(RuntimeFault{vm.stage.step_index, program.sprites[slot.sprite].name,
                                             slot.script, fault.message});
            slot.thread.reset();
            continue;
        }
        if (outcome == Outcome::Done) {
            slot.thread.reset();
        } else if (outcome == Outcome::StopAll) {
            for (auto& other : vm.slots) other.thread.reset();
            break;
        }
    }

    ++vm.stage.step_index;
}

VmState vm_stepped(const Program& program, VmState state, const VmOptions& options) {
    vm_step(program, state, options);
    return state;
}

}  // namespace stagecheck
