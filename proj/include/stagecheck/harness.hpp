#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stagecheck/dsl.hpp"
#include "stagecheck/stage.hpp"

namespace stagecheck {

struct Tally {
    std::int64_t succ = 0;
    std::int64_t fail = 0;

    std::int64_t total() const noexcept { return succ + fail; }
    /// succ / (succ + fail); nullopt when nothing was reported.
    std::optional<double> rate() const noexcept;
    friend bool operator==(const Tally&, const Tally&) = default;
};

enum class Verdict : std::uint8_t { Satisfied, Failed, NotDemonstrated };
std::string_view verdict_name(Verdict v);

using ReportTally = std::map<std::string, Tally>;

struct PendingCheck {
    std::size_t trigger = 0;  // index into the suite
    std::int64_t remaining = 0;
    SavedSnapshot snapshot;
    friend bool operator==(const PendingCheck&, const PendingCheck&) = default;
};

struct Effect {
    std::size_t trigger = 0;  // trigger whose action produced the effect
    dsl::ActionItem item;     // never Nothing
    friend bool operator==(const Effect&, const Effect&) = default;
};

struct HarnessOptions {
    std::set<std::string> disabled;  // triggers that never become active in this run
    std::uint64_t seed = 0;          // drives Random-True/False, separate from the program RNG
};

struct HarnessState {
    std::vector<bool> active;
    std::vector<bool> disabled;
    std::vector<PendingCheck> pending;  // arming order
    std::vector<bool> last_when;
    ReportTally tally;
    std::array<int, kAllKeys.size()> injected{};  // remaining steps per key, 0 = not held
    SavedSnapshot prev_props;
    std::vector<std::pair<std::size_t, bool>> scheduled;  // (trigger, add?) applied next step
    Rng rng;

    std::vector<ValueRef> when_refs;                 // SAVED reads in any WHEN condition
    std::vector<std::vector<ValueRef>> action_refs;  // SAVED reads in each trigger's actions
    std::vector<std::int64_t> armings;      // per trigger
    std::vector<std::int64_t> resolutions;  // per trigger

    bool is_active(const dsl::Suite& suite, std::string_view id) const;
    friend bool operator==(const HarnessState&, const HarnessState&) = default;
};

/// Initial state: a trigger starts active when it has add-on-start or is never the
/// target of an AddTrigger action. `initial` seeds the one-step-earlier values
/// read by SAVED references in WHEN conditions.
HarnessState init_harness(const dsl::Suite& suite, const HarnessOptions& options = {},
                          const StageState* initial = nullptr);

/// One monitor step, called once after every vm_step with the post-step stage.
std::vector<Effect> harness_step(const dsl::Suite& suite, HarnessState& h, const StageState& stage);

/// SAVED reads resolve against `saved`; entries missing there read the live value.
bool evaluate_condition(const dsl::Condition& c, const StageState& stage, const SavedSnapshot& saved,
                        Rng& rng);

/// Keys injected by Input actions for the coming vm step; consumes one step of each.
KeySet take_injected_keys(HarnessState& h);

Verdict verdict_for(const Tally& t, double threshold) noexcept;
std::map<std::string, Verdict> finalize(const ReportTally& tally, double threshold);

}  // namespace stagecheck
