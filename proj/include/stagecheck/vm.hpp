#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stagecheck/program.hpp"
#include "stagecheck/stage.hpp"

namespace stagecheck {

inline constexpr int kDefaultBlockBudget = 10'000;

struct RuntimeFault {
    std::int64_t step = 0;
    std::string sprite;
    std::size_t script = 0;  // index within the sprite's scripts
    std::string message;
    friend bool operator==(const RuntimeFault&, const RuntimeFault&) = default;
};

struct GlideState {
    double start_x = 0, start_y = 0;
    double target_x = 0, target_y = 0;
    std::int64_t duration = 0;
    std::int64_t elapsed = 0;
    friend bool operator==(const GlideState&, const GlideState&) = default;
};

struct Frame {
    const std::vector<Block>* body = nullptr;
    std::size_t pc = 0;
    enum class Loop : std::uint8_t { None, Forever, Repeat } loop = Loop::None;
    std::int64_t remaining = 0;  // Repeat iterations left, including the current one
    friend bool operator==(const Frame&, const Frame&) = default;
};

struct ThreadState {
    std::vector<Frame> frames;
    std::int64_t resume_at = 0;  // first step at which a waiting thread runs again
    std::optional<GlideState> glide;
    friend bool operator==(const ThreadState&, const ThreadState&) = default;
};

struct ScriptSlot {
    std::size_t sprite = 0;
    std::size_t script = 0;
    std::optional<ThreadState> thread;  // at most one live thread per script
    friend bool operator==(const ScriptSlot&, const ScriptSlot&) = default;
};

struct VmState {
    StageState stage;
    std::vector<ScriptSlot> slots;  // (sprite declaration order, script declaration order)
    std::vector<RuntimeFault> faults;
    bool started = false;

    std::size_t live_threads() const noexcept;
    friend bool operator==(const VmState&, const VmState&) = default;
};

struct VmOptions {
    int block_budget = kDefaultBlockBudget;
};

/// Builds the initial stage from declarations, seeds the RNG and spawns one
/// thread per green-flag script. No step is executed.
VmState green_flag(const Program& program, std::uint64_t seed);

/// Executes one frame: key-hat dispatch, every live thread until it yields, then
/// step_index += 1. The program must be the one `state` was started from.
void vm_step(const Program& program, VmState& state, const VmOptions& options = {});
VmState vm_stepped(const Program& program, VmState state, const VmOptions& options = {});

/// If-on-edge-bounce semantics for a single sprite.
SpriteState bounce_if_on_edge(SpriteState sprite);

}  // namespace stagecheck
