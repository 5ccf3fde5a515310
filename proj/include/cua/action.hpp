#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cua/types.hpp"

namespace cua::core {

// The compact agent action space. Coordinates are normalized to [0,1] and
// quantized to the 4-decimal canonical grid.

struct Click {
  double x = 0, y = 0;
  MouseButton button = MouseButton::left;  // middle canonicalizes to MiddleClick
  bool operator==(const Click&) const = default;
};
struct MiddleClick {
  double x = 0, y = 0;
  bool operator==(const MiddleClick&) const = default;
};
struct DoubleClick {
  double x = 0, y = 0;
  MouseButton button = MouseButton::left;
  bool operator==(const DoubleClick&) const = default;
};
struct TripleClick {
  double x = 0, y = 0;
  MouseButton button = MouseButton::left;
  bool operator==(const TripleClick&) const = default;
};
struct MoveTo {
  double x = 0, y = 0;
  bool operator==(const MoveTo&) const = default;
};
struct DragTo {
  double x = 0, y = 0;
  bool operator==(const DragTo&) const = default;
};
struct Scroll {  // vertical: dy != 0, dx == 0
  int dx = 0, dy = 0;
  std::optional<Point> pos;
  bool operator==(const Scroll&) const = default;
};
struct HScroll {  // horizontal: dx != 0, dy == 0
  int dx = 0, dy = 0;
  std::optional<Point> pos;
  bool operator==(const HScroll&) const = default;
};
struct Write {
  std::string text;  // non-empty
  bool operator==(const Write&) const = default;
};
struct Press {
  std::string key;  // canonical
  bool operator==(const Press&) const = default;
};
struct Hotkey {
  std::vector<std::string> keys;  // >= 2, modifiers first in canonical order
  bool operator==(const Hotkey&) const = default;
};
struct Wait {
  bool operator==(const Wait&) const = default;
};
struct Terminate {
  TaskStatus status = TaskStatus::success;
  bool operator==(const Terminate&) const = default;
};

using AgentAction =
    std::variant<Click, MiddleClick, DoubleClick, TripleClick, MoveTo, DragTo,
                 Scroll, HScroll, Write, Press, Hotkey, Wait, Terminate>;

enum class ActionKind {
  click, middle_click, double_click, triple_click, move_to, drag_to,
  scroll, hscroll, write, press, hotkey, wait, terminate,
};

ActionKind action_kind(const AgentAction& a);
std::string action_kind_name(ActionKind k);

/// The target coordinate of a coordinate-carrying action (click family,
/// moveTo, dragTo, scroll with position); nullopt otherwise.
std::optional<Point> action_point(const AgentAction& a);

bool is_terminate(const AgentAction& a);

/// First violated invariant, or nullopt when the action is well-formed.
std::optional<std::string> check_action(const AgentAction& a);

/// Canonical JSON encoding; decode reverses it exactly.
std::string action_to_json(const AgentAction& a);
AgentAction action_from_json(const std::string& json_text);

}  // namespace cua::core
