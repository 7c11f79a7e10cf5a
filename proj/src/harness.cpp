#include "stagecheck/harness.hpp"

#include <algorithm>

namespace stagecheck {

using namespace dsl;

std::optional<double> Tally::rate() const noexcept {
    if (total() == 0) return std::nullopt;
    return static_cast<double>(succ) / static_cast<double>(total());
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Failed: return "failed";
        case Verdict::NotDemonstrated: return "not-demonstrated";
    }
    return "";
}

bool HarnessState::is_active(const Suite& suite, std::string_view id) const {
    for (std::size_t i = 0; i < suite.size(); ++i)
        if (suite[i].id == id) return active[i];
    return false;
}

namespace {

std::optional<std::size_t> index_of(const Suite& suite, std::string_view id) {
    for (std::size_t i = 0; i < suite.size(); ++i)
        if (suite[i].id == id) return i;
    return std::nullopt;
}

std::vector<ValueRef> when_saved_refs(const Suite& suite) {
    std::vector<ValueRef> out;
    for (const auto& def : suite)
        for (const auto& ref : saved_refs_in_conditions(def))
            if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(ref);
    return out;
}

double operand_value(const Operand& o, const StageState& stage, const SavedSnapshot& saved) {
    if (const auto* lit = std::get_if<Literal>(&o)) return lit->value;
    const auto& r = std::get<Read>(o);
    if (r.saved) {
        auto it = saved.entries.find(r.ref);
        if (it != saved.entries.end()) return it->second;
    }
    return read_value(stage, r.ref);
}

void emit(HarnessState& h, std::vector<Effect>& effects, std::size_t trigger, const ActionItem& item) {
    if (std::holds_alternative<Nothing>(item)) return;
    if (const auto* r = std::get_if<Report>(&item)) {
        auto& t = h.tally[r->test_id];
        (r->success ? t.succ : t.fail) += 1;
    } else if (const auto* in = std::get_if<InputKey>(&item)) {
        auto& slot = h.injected[static_cast<std::size_t>(in->key)];
        slot = std::max(slot, in->steps);
    }
    effects.push_back(Effect{trigger, item});
}

void resolve(const Suite& suite, HarnessState& h, const PendingCheck& check, const StageState& stage,
             std::vector<Effect>& effects) {
    const auto& def = suite[check.trigger];
    for (const auto& action : def.actions) {
        if (const auto* d = std::get_if<Do>(&action)) {
            emit(h, effects, check.trigger, d->item);
        } else {
            const auto& ite = std::get<IfThenElse>(action);
            const bool holds = evaluate_condition(ite.cond, stage, check.snapshot, h.rng);
            emit(h, effects, check.trigger, holds ? ite.then_item : ite.else_item);
        }
    }
    ++h.resolutions[check.trigger];
    if (def.flags.one_shot) h.active[check.trigger] = false;
}

void cancel_pending(HarnessState& h, std::size_t trigger) {
    std::erase_if(h.pending, [&](const PendingCheck& p) { return p.trigger == trigger; });
}

// Resolves every pending check at zero, keeping arming order.
void resolve_due(const Suite& suite, HarnessState& h, const StageState& stage,
                 std::vector<Effect>& effects) {
    std::vector<PendingCheck> due;
    std::vector<PendingCheck> keep;
    for (auto& p : h.pending) (p.remaining <= 0 ? due : keep).push_back(std::move(p));
    h.pending = std::move(keep);
    for (const auto& p : due) resolve(suite, h, p, stage, effects);
}

}  // namespace

bool evaluate_condition(const Condition& c, const StageState& stage, const SavedSnapshot& saved,
                        Rng& rng) {
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Always>) {
                return true;
            } else if constexpr (std::is_same_v<T, Compare>) {
                return dsl::compare(operand_value(node.lhs, stage, saved), node.op,
                                    operand_value(node.rhs, stage, saved));
            } else if constexpr (std::is_same_v<T, IsTouch>) {
                return sprites_touching(stage, node.a, node.b);
            } else if constexpr (std::is_same_v<T, OnEdge>) {
                return sprite_on_edge(stage, node.sprite, node.side);
            } else if constexpr (std::is_same_v<T, KeyDown>) {
                return stage.keys_down.contains(node.key);
            } else {
                return rng.next_coin();
            }
        },
        c);
}

HarnessState init_harness(const Suite& suite, const HarnessOptions& options, const StageState* initial) {
    HarnessState h;
    const std::size_t n = suite.size();
    h.active.assign(n, false);
    h.disabled.assign(n, false);
    h.last_when.assign(n, false);
    h.armings.assign(n, 0);
    h.resolutions.assign(n, 0);
    h.rng.reseed(options.seed ^ 0x5EED'C0DE'7E57'AB1EULL);

    std::vector<bool> add_target(n, false);
    for (const auto& def : suite)
        for (const auto& a : def.actions) {
            auto mark = [&](const ActionItem& item) {
                if (const auto* add = std::get_if<AddTrigger>(&item))
                    if (auto i = index_of(suite, add->id)) add_target[*i] = true;
            };
            if (const auto* d = std::get_if<Do>(&a)) {
                mark(d->item);
            } else {
                mark(std::get<IfThenElse>(a).then_item);
                mark(std::get<IfThenElse>(a).else_item);
            }
        }

    for (std::size_t i = 0; i < n; ++i) {
        h.disabled[i] = options.disabled.contains(suite[i].id);
        h.active[i] = !h.disabled[i] && (suite[i].flags.add_on_start || !add_target[i]);
    }
    for (const auto& id : report_test_ids(suite)) h.tally[id];
    h.when_refs = when_saved_refs(suite);
    for (const auto& def : suite) h.action_refs.push_back(saved_refs_in_actions(def));
    if (initial) {
        h.prev_props = capture_snapshot(*initial, h.when_refs);
    }
    return h;
}

std::vector<Effect> harness_step(const Suite& suite, HarnessState& h, const StageState& stage) {
    std::vector<Effect> effects;

    for (const auto& [trigger, add] : h.scheduled) {
        if (add) {
            if (h.disabled[trigger] || h.active[trigger]) continue;
            h.active[trigger] = true;
            h.last_when[trigger] = false;
        } else {
            h.active[trigger] = false;
            h.last_when[trigger] = false;
            cancel_pending(h, trigger);
        }
    }
    h.scheduled.clear();

    // (1) countdown
    for (auto& p : h.pending) --p.remaining;
    resolve_due(suite, h, stage, effects);

    // (2) WHEN evaluation and arming
    for (std::size_t i = 0; i < suite.size(); ++i) {
        if (!h.active[i]) {
            h.last_when[i] = false;
            continue;
        }
        const auto& def = suite[i];
        bool holds = true;
        for (const auto& c : def.conditions) {
            if (!evaluate_condition(c, stage, h.prev_props, h.rng)) {
                holds = false;
                break;
            }
        }
        const bool rising = !h.last_when[i];
        h.last_when[i] = holds;
        if (!holds || (def.flags.debounce && !rising)) continue;
        if (def.flags.one_shot &&
            std::any_of(h.pending.begin(), h.pending.end(), [&](const PendingCheck& p) { return p.trigger == i; }))
            continue;

        h.pending.push_back(PendingCheck{i, def.delay_steps, capture_snapshot(stage, h.action_refs[i])});
        ++h.armings[i];
    }
    resolve_due(suite, h, stage, effects);

    // (4) trigger-set changes apply at the next step
    for (const auto& e : effects) {
        if (const auto* a = std::get_if<AddTrigger>(&e.item)) {
            if (auto i = index_of(suite, a->id)) h.scheduled.emplace_back(*i, true);
        } else if (const auto* r = std::get_if<RemoveTrigger>(&e.item)) {
            if (auto i = index_of(suite, r->id)) h.scheduled.emplace_back(*i, false);
        }
    }

    // (5) one-step-earlier values for WHEN-side SAVED reads
    h.prev_props = capture_snapshot(stage, h.when_refs);
    return effects;
}

KeySet take_injected_keys(HarnessState& h) {
    KeySet keys;
    for (Key k : kAllKeys) {
        auto& remaining = h.injected[static_cast<std::size_t>(k)];
        if (remaining > 0) {
            keys.insert(k);
            --remaining;
        }
    }
    return keys;
}

Verdict verdict_for(const Tally& t, double threshold) noexcept {
    const auto rate = t.rate();
    if (!rate) return Verdict::NotDemonstrated;
    return *rate >= threshold ? Verdict::Satisfied : Verdict::Failed;
}

std::map<std::string, Verdict> finalize(const ReportTally& tally, double threshold) {
    std::map<std::string, Verdict> out;
    for (const auto& [id, t] : tally) out.emplace(id, verdict_for(t, threshold));
    return out;
}

}  // namespace stagecheck
