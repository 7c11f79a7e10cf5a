#include "stagecheck/stage.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stagecheck/errors.hpp"

namespace stagecheck {

namespace {

constexpr std::array<std::string_view, 5> kKeyNames{"up-arrow", "down-arrow", "left-arrow",
                                                    "right-arrow", "space"};
constexpr std::array<std::string_view, 3> kPropNames{"x", "y", "direction"};
constexpr std::array<std::string_view, 5> kSideNames{"top", "bottom", "left", "right", "any"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == text) return static_cast<Enum>(i);
    return std::nullopt;
}

}  // namespace

std::string_view key_name(Key key) { return kKeyNames[static_cast<std::size_t>(key)]; }
std::optional<Key> parse_key(std::string_view text) { return lookup<Key>(kKeyNames, text); }
std::string_view prop_name(Prop prop) { return kPropNames[static_cast<std::size_t>(prop)]; }
std::optional<Prop> parse_prop(std::string_view text) { return lookup<Prop>(kPropNames, text); }
std::string_view side_name(Side side) { return kSideNames[static_cast<std::size_t>(side)]; }
std::optional<Side> parse_side(std::string_view text) { return lookup<Side>(kSideNames, text); }

double normalize_direction(double degrees) {
    double d = std::fmod(std::fmod(degrees, 360.0) + 360.0, 360.0);
    if (d == 0.0) d = 0.0;  // folds -0.0
    return d;
}

double sin_deg(double degrees) {
    const double d = normalize_direction(degrees);
    if (d == 0.0 || d == 180.0) return 0.0;
    if (d == 90.0) return 1.0;
    if (d == 270.0) return -1.0;
    return std::sin(d * std::numbers::pi / 180.0);
}

double cos_deg(double degrees) {
    const double d = normalize_direction(degrees);
    if (d == 90.0 || d == 270.0) return 0.0;
    if (d == 0.0) return 1.0;
    if (d == 180.0) return -1.0;
    return std::cos(d * std::numbers::pi / 180.0);
}

std::vector<Key> KeySet::keys() const {
    std::vector<Key> out;
    for (Key k : kAllKeys)
        if (contains(k)) out.push_back(k);
    return out;
}

SpriteState::SpriteState(std::string name, double x, double y, double direction, double width,
                         double height)
    : name_(std::move(name)), x_(x), y_(y), direction_(normalize_direction(direction)),
      width_(width), height_(height) {
    if (!(width > 0.0) || !(height > 0.0))
        throw std::invalid_argument("sprite '" + name_ + "' must have positive width and height");
}

double SpriteState::property(Prop prop) const noexcept {
    switch (prop) {
        case Prop::X: return x_;
        case Prop::Y: return y_;
        case Prop::Direction: return direction_;
    }
    return 0.0;
}

std::string describe(const ValueRef& ref) {
    if (const auto* p = std::get_if<PropRef>(&ref))
        return std::string(prop_name(p->prop)) + " OF " + p->sprite;
    const auto& v = std::get<VarRef>(ref);
    return v.sprite.empty() ? v.name : v.name + " OF " + v.sprite;
}

const SpriteState* StageState::find_sprite(std::string_view name) const noexcept {
    for (const auto& s : sprites)
        if (s.name() == name) return &s;
    return nullptr;
}

SpriteState* StageState::find_sprite(std::string_view name) noexcept {
    for (auto& s : sprites)
        if (s.name() == name) return &s;
    return nullptr;
}

const SpriteState& StageState::sprite(std::string_view name) const {
    if (const auto* s = find_sprite(name)) return *s;
    throw UnknownSprite(std::string(name));
}

SpriteState& StageState::sprite(std::string_view name) {
    if (auto* s = find_sprite(name)) return *s;
    throw UnknownSprite(std::string(name));
}

double SavedSnapshot::at(const ValueRef& ref) const {
    auto it = entries.find(ref);
    if (it == entries.end()) throw std::out_of_range("snapshot has no entry for " + describe(ref));
    return it->second;
}

double get_property(const StageState& stage, std::string_view sprite, Prop prop) {
    return stage.sprite(sprite).property(prop);
}

double read_value(const StageState& stage, const ValueRef& ref) {
    if (const auto* p = std::get_if<PropRef>(&ref)) return get_property(stage, p->sprite, p->prop);
    const auto& v = std::get<VarRef>(ref);
    if (v.sprite.empty()) {
        auto it = stage.global_vars.find(v.name);
        if (it == stage.global_vars.end()) throw UnknownVariable(v.name);
        return it->second;
    }
    const auto& s = stage.sprite(v.sprite);
    auto it = s.local_vars.find(v.name);
    if (it == s.local_vars.end()) throw UnknownVariable(v.name + " OF " + v.sprite);
    return it->second;
}

bool boxes_touch(const SpriteState& a, const SpriteState& b) noexcept {
    return a.left() <= b.right() && b.left() <= a.right() && a.bottom() <= b.top() &&
           b.bottom() <= a.top();
}

bool sprites_touching(const StageState& stage, std::string_view a, std::string_view b) {
    const auto& sa = stage.sprite(a);
    const auto& sb = stage.sprite(b);
    if (&sa == &sb) throw std::invalid_argument("a sprite cannot be tested against itself");
    return boxes_touch(sa, sb);
}

bool box_on_edge(const SpriteState& s, Side side) noexcept {
    switch (side) {
        case Side::Top: return s.top() >= StageBounds::top;
        case Side::Bottom: return s.bottom() <= StageBounds::bottom;
        case Side::Left: return s.left() <= StageBounds::left;
        case Side::Right: return s.right() >= StageBounds::right;
        case Side::Any:
            return box_on_edge(s, Side::Top) || box_on_edge(s, Side::Bottom) ||
                   box_on_edge(s, Side::Left) || box_on_edge(s, Side::Right);
    }
    return false;
}

bool sprite_on_edge(const StageState& stage, std::string_view sprite, Side side) {
    return box_on_edge(stage.sprite(sprite), side);
}

SavedSnapshot capture_snapshot(const StageState& stage, std::span<const ValueRef> refs) {
    SavedSnapshot snap;
    snap.captured_at = stage.step_index;
    for (const auto& ref : refs) snap.entries.emplace(ref, read_value(stage, ref));
    return snap;
}

}  // namespace stagecheck
