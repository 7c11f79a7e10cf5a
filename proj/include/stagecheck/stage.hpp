#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stagecheck/rng.hpp"

namespace stagecheck {

enum class Key : std::uint8_t { UpArrow, DownArrow, LeftArrow, RightArrow, Space };
inline constexpr std::array<Key, 5> kAllKeys{Key::UpArrow, Key::DownArrow, Key::LeftArrow,
                                             Key::RightArrow, Key::Space};

std::string_view key_name(Key key);
std::optional<Key> parse_key(std::string_view text);

enum class Prop : std::uint8_t { X, Y, Direction };
std::string_view prop_name(Prop prop);
std::optional<Prop> parse_prop(std::string_view text);

enum class Side : std::uint8_t { Top, Bottom, Left, Right, Any };
std::string_view side_name(Side side);
std::optional<Side> parse_side(std::string_view text);

// 480x360 stage with the origin at its center.
struct StageBounds {
    static constexpr double left = -240.0;
    static constexpr double right = 240.0;
    static constexpr double bottom = -180.0;
    static constexpr double top = 180.0;
};

/// Maps any angle in degrees into [0, 360).
double normalize_direction(double degrees);

/// Trigonometry in degrees; exact at multiples of 90.
double sin_deg(double degrees);
double cos_deg(double degrees);

class KeySet {
public:
    constexpr KeySet() = default;
    constexpr bool contains(Key k) const noexcept { return (bits_ & bit(k)) != 0; }
    constexpr void insert(Key k) noexcept { bits_ |= bit(k); }
    constexpr void erase(Key k) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(k)); }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr KeySet operator|(KeySet other) const noexcept {
        KeySet out;
        out.bits_ = bits_ | other.bits_;
        return out;
    }
    std::vector<Key> keys() const;
    friend constexpr bool operator==(KeySet, KeySet) = default;

private:
    static constexpr std::uint8_t bit(Key k) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
    }
    std::uint8_t bits_ = 0;
};

class SpriteState {
public:
    SpriteState(std::string name, double x, double y, double direction, double width, double height);

    const std::string& name() const noexcept { return name_; }
    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    double direction() const noexcept { return direction_; }
    double width() const noexcept { return width_; }
    double height() const noexcept { return height_; }

    double left() const noexcept { return x_ - width_ / 2; }
    double right() const noexcept { return x_ + width_ / 2; }
    double bottom() const noexcept { return y_ - height_ / 2; }
    double top() const noexcept { return y_ + height_ / 2; }

    void set_x(double x) noexcept { x_ = x; }
    void set_y(double y) noexcept { y_ = y; }
    void set_position(double x, double y) noexcept { x_ = x; y_ = y; }
    void set_direction(double degrees) noexcept { direction_ = normalize_direction(degrees); }
    void turn(double delta) noexcept { set_direction(direction_ + delta); }

    double property(Prop prop) const noexcept;

    std::map<std::string, double, std::less<>> local_vars;

    friend bool operator==(const SpriteState&, const SpriteState&) = default;

private:
    std::string name_;
    double x_;
    double y_;
    double direction_;
    double width_;
    double height_;
};

struct PropRef {
    std::string sprite;
    Prop prop = Prop::X;
    friend auto operator<=>(const PropRef&, const PropRef&) = default;
};

// A global variable when `sprite` is empty, otherwise a sprite-local one.
struct VarRef {
    std::string name;
    std::string sprite;
    friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

using ValueRef = std::variant<PropRef, VarRef>;

std::string describe(const ValueRef& ref);

struct StageState {
    std::vector<SpriteState> sprites;  // declaration order
    std::map<std::string, double, std::less<>> global_vars;
    KeySet keys_down;
    std::int64_t step_index = 0;
    Rng rng;

    const SpriteState* find_sprite(std::string_view name) const noexcept;
    SpriteState* find_sprite(std::string_view name) noexcept;
    const SpriteState& sprite(std::string_view name) const;
    SpriteState& sprite(std::string_view name);

    friend bool operator==(const StageState&, const StageState&) = default;
};

struct SavedSnapshot {
    std::map<ValueRef, double> entries;
    std::int64_t captured_at = 0;

    double at(const ValueRef& ref) const;
    friend bool operator==(const SavedSnapshot&, const SavedSnapshot&) = default;
};

double get_property(const StageState& stage, std::string_view sprite, Prop prop);
double read_value(const StageState& stage, const ValueRef& ref);

/// Closed-interval AABB overlap; edge contact counts.
bool sprites_touching(const StageState& stage, std::string_view a, std::string_view b);
bool boxes_touch(const SpriteState& a, const SpriteState& b) noexcept;

/// True when the box touches or crosses the named boundary.
bool sprite_on_edge(const StageState& stage, std::string_view sprite, Side side);
bool box_on_edge(const SpriteState& sprite, Side side) noexcept;

SavedSnapshot capture_snapshot(const StageState& stage, std::span<const ValueRef> refs);

}  // namespace stagecheck
