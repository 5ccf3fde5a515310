#include "cua/action.hpp"

#include <json.hpp>

#include "cua/keys.hpp"
#include "cua/util.hpp"

namespace cua::core {

using nlohmann::json;

std::string os_name(Os os) {
  switch (os) {
    case Os::windows: return "windows";
    case Os::macos: return "macos";
    case Os::ubuntu: return "ubuntu";
  }
  return "ubuntu";
}

Os os_from_name(const std::string& name) {
  if (name == "windows") return Os::windows;
  if (name == "macos" || name == "darwin") return Os::macos;
  if (name == "ubuntu" || name == "linux") return Os::ubuntu;
  throw CuaError(Err::format_error, "unknown os: " + name);
}

std::string status_name(TaskStatus s) {
  return s == TaskStatus::success ? "success" : "failure";
}

TaskStatus status_from_name(const std::string& name) {
  if (name == "success") return TaskStatus::success;
  if (name == "failure") return TaskStatus::failure;
  throw CuaError(Err::format_error, "unknown status: " + name);
}

std::string button_name(MouseButton b) {
  switch (b) {
    case MouseButton::left: return "left";
    case MouseButton::right: return "right";
    case MouseButton::middle: return "middle";
  }
  return "left";
}

MouseButton button_from_name(const std::string& name) {
  if (name == "left") return MouseButton::left;
  if (name == "right") return MouseButton::right;
  if (name == "middle") return MouseButton::middle;
  throw CuaError(Err::format_error, "unknown button: " + name);
}

std::string event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::move: return "move";
    case EventKind::button_down: return "button_down";
    case EventKind::button_up: return "button_up";
    case EventKind::wheel: return "wheel";
    case EventKind::key_down: return "key_down";
    case EventKind::key_up: return "key_up";
  }
  return "move";
}

EventKind event_kind_from_name(const std::string& name) {
  if (name == "move") return EventKind::move;
  if (name == "button_down") return EventKind::button_down;
  if (name == "button_up") return EventKind::button_up;
  if (name == "wheel") return EventKind::wheel;
  if (name == "key_down") return EventKind::key_down;
  if (name == "key_up") return EventKind::key_up;
  throw CuaError(Err::format_error, "unknown event kind: " + name);
}

std::string verdict_status_name(VerdictStatus v) {
  switch (v) {
    case VerdictStatus::correct: return "correct";
    case VerdictStatus::incorrect: return "incorrect";
    case VerdictStatus::redundant: return "redundant";
  }
  return "correct";
}

std::string privacy_name(PrivacyLevel p) {
  switch (p) {
    case PrivacyLevel::none: return "none";
    case PrivacyLevel::low: return "low";
    case PrivacyLevel::medium: return "medium";
    case PrivacyLevel::high: return "high";
  }
  return "none";
}

PrivacyLevel privacy_from_name(const std::string& name) {
  std::string low = to_lower(name);
  if (low == "none") return PrivacyLevel::none;
  if (low == "low") return PrivacyLevel::low;
  if (low == "medium") return PrivacyLevel::medium;
  if (low == "high") return PrivacyLevel::high;
  throw CuaError(Err::verdict_parse_error, "unknown privacy level: " + name);
}

ActionKind action_kind(const AgentAction& a) {
  struct V {
    ActionKind operator()(const Click&) { return ActionKind::click; }
    ActionKind operator()(const MiddleClick&) { return ActionKind::middle_click; }
    ActionKind operator()(const DoubleClick&) { return ActionKind::double_click; }
    ActionKind operator()(const TripleClick&) { return ActionKind::triple_click; }
    ActionKind operator()(const MoveTo&) { return ActionKind::move_to; }
    ActionKind operator()(const DragTo&) { return ActionKind::drag_to; }
    ActionKind operator()(const Scroll&) { return ActionKind::scroll; }
    ActionKind operator()(const HScroll&) { return ActionKind::hscroll; }
    ActionKind operator()(const Write&) { return ActionKind::write; }
    ActionKind operator()(const Press&) { return ActionKind::press; }
    ActionKind operator()(const Hotkey&) { return ActionKind::hotkey; }
    ActionKind operator()(const Wait&) { return ActionKind::wait; }
    ActionKind operator()(const Terminate&) { return ActionKind::terminate; }
  };
  return std::visit(V{}, a);
}

std::string action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::click: return "click";
    case ActionKind::middle_click: return "middleClick";
    case ActionKind::double_click: return "doubleClick";
    case ActionKind::triple_click: return "tripleClick";
    case ActionKind::move_to: return "moveTo";
    case ActionKind::drag_to: return "dragTo";
    case ActionKind::scroll: return "scroll";
    case ActionKind::hscroll: return "hscroll";
    case ActionKind::write: return "write";
    case ActionKind::press: return "press";
    case ActionKind::hotkey: return "hotkey";
    case ActionKind::wait: return "wait";
    case ActionKind::terminate: return "terminate";
  }
  return "?";
}

std::optional<Point> action_point(const AgentAction& a) {
  struct V {
    std::optional<Point> operator()(const Click& c) { return Point{c.x, c.y}; }
    std::optional<Point> operator()(const MiddleClick& c) { return Point{c.x, c.y}; }
    std::optional<Point> operator()(const DoubleClick& c) { return Point{c.x, c.y}; }
    std::optional<Point> operator()(const TripleClick& c) { return Point{c.x, c.y}; }
    std::optional<Point> operator()(const MoveTo& c) { return Point{c.x, c.y}; }
    std::optional<Point> operator()(const DragTo& c) { return Point{c.x, c.y}; }
    std::optional<Point> operator()(const Scroll& s) { return s.pos; }
    std::optional<Point> operator()(const HScroll& s) { return s.pos; }
    std::optional<Point> operator()(const Write&) { return std::nullopt; }
    std::optional<Point> operator()(const Press&) { return std::nullopt; }
    std::optional<Point> operator()(const Hotkey&) { return std::nullopt; }
    std::optional<Point> operator()(const Wait&) { return std::nullopt; }
    std::optional<Point> operator()(const Terminate&) { return std::nullopt; }
  };
  return std::visit(V{}, a);
}

bool is_terminate(const AgentAction& a) {
  return std::holds_alternative<Terminate>(a);
}

namespace {

bool coord_ok(double v) { return v >= 0.0 && v <= 1.0; }

std::optional<std::string> check_xy(double x, double y) {
  if (!coord_ok(x) || !coord_ok(y)) return "coordinate outside [0,1]";
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_action(const AgentAction& a) {
  struct V {
    std::optional<std::string> operator()(const Click& c) {
      if (auto e = check_xy(c.x, c.y)) return e;
      if (c.button == MouseButton::middle)
        return "click(middle) must be canonicalized to middleClick";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const MiddleClick& c) {
      return check_xy(c.x, c.y);
    }
    std::optional<std::string> operator()(const DoubleClick& c) {
      return check_xy(c.x, c.y);
    }
    std::optional<std::string> operator()(const TripleClick& c) {
      return check_xy(c.x, c.y);
    }
    std::optional<std::string> operator()(const MoveTo& c) {
      return check_xy(c.x, c.y);
    }
    std::optional<std::string> operator()(const DragTo& c) {
      return check_xy(c.x, c.y);
    }
    std::optional<std::string> operator()(const Scroll& s) {
      if (s.dy == 0) return "scroll requires nonzero dy";
      if (s.dx != 0) return "scroll is vertical; use hscroll for dx";
      if (s.pos && check_xy(s.pos->x, s.pos->y)) return "coordinate outside [0,1]";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const HScroll& s) {
      if (s.dx == 0) return "hscroll requires nonzero dx";
      if (s.dy != 0) return "hscroll is horizontal; use scroll for dy";
      if (s.pos && check_xy(s.pos->x, s.pos->y)) return "coordinate outside [0,1]";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const Write& w) {
      if (w.text.empty()) return "write text must be non-empty";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const Press& p) {
      if (p.key.empty()) return "press key must be non-empty";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const Hotkey& h) {
      if (h.keys.size() < 2) return "hotkey needs at least 2 keys";
      auto canon = keys::canonical_hotkey(h.keys);
      if (canon != h.keys) return "hotkey keys not in canonical order";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const Wait&) { return std::nullopt; }
    std::optional<std::string> operator()(const Terminate&) { return std::nullopt; }
  };
  return std::visit(V{}, a);
}

std::string action_to_json(const AgentAction& a) {
  json j;
  j["type"] = action_kind_name(action_kind(a));
  struct V {
    json& j;
    void operator()(const Click& c) {
      j["x"] = c.x; j["y"] = c.y; j["button"] = button_name(c.button);
    }
    void operator()(const MiddleClick& c) { j["x"] = c.x; j["y"] = c.y; }
    void operator()(const DoubleClick& c) {
      j["x"] = c.x; j["y"] = c.y; j["button"] = button_name(c.button);
    }
    void operator()(const TripleClick& c) {
      j["x"] = c.x; j["y"] = c.y; j["button"] = button_name(c.button);
    }
    void operator()(const MoveTo& c) { j["x"] = c.x; j["y"] = c.y; }
    void operator()(const DragTo& c) { j["x"] = c.x; j["y"] = c.y; }
    void operator()(const Scroll& s) {
      j["dx"] = s.dx; j["dy"] = s.dy;
      if (s.pos) { j["x"] = s.pos->x; j["y"] = s.pos->y; }
    }
    void operator()(const HScroll& s) {
      j["dx"] = s.dx; j["dy"] = s.dy;
      if (s.pos) { j["x"] = s.pos->x; j["y"] = s.pos->y; }
    }
    void operator()(const Write& w) { j["text"] = w.text; }
    void operator()(const Press& p) { j["key"] = p.key; }
    void operator()(const Hotkey& h) { j["keys"] = h.keys; }
    void operator()(const Wait&) {}
    void operator()(const Terminate& t) { j["status"] = status_name(t.status); }
  };
  std::visit(V{j}, a);
  return j.dump();
}

AgentAction action_from_json(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("type"))
    throw CuaError(Err::format_error, "bad action json");
  std::string type = j.at("type").get<std::string>();
  auto xy = [&](double& x, double& y) {
    x = j.at("x").get<double>();
    y = j.at("y").get<double>();
  };
  auto opt_pos = [&]() -> std::optional<Point> {
    if (j.contains("x")) return Point{j.at("x").get<double>(), j.at("y").get<double>()};
    return std::nullopt;
  };
  if (type == "click") {
    Click c; xy(c.x, c.y);
    c.button = button_from_name(j.value("button", "left"));
    return c;
  }
  if (type == "middleClick") { MiddleClick c; xy(c.x, c.y); return c; }
  if (type == "doubleClick") {
    DoubleClick c; xy(c.x, c.y);
    c.button = button_from_name(j.value("button", "left"));
    return c;
  }
  if (type == "tripleClick") {
    TripleClick c; xy(c.x, c.y);
    c.button = button_from_name(j.value("button", "left"));
    return c;
  }
  if (type == "moveTo") { MoveTo c; xy(c.x, c.y); return c; }
  if (type == "dragTo") { DragTo c; xy(c.x, c.y); return c; }
  if (type == "scroll") {
    Scroll s;
    s.dx = j.value("dx", 0); s.dy = j.value("dy", 0);
    s.pos = opt_pos();
    return s;
  }
  if (type == "hscroll") {
    HScroll s;
    s.dx = j.value("dx", 0); s.dy = j.value("dy", 0);
    s.pos = opt_pos();
    return s;
  }
  if (type == "write") return Write{j.at("text").get<std::string>()};
  if (type == "press") return Press{j.at("key").get<std::string>()};
  if (type == "hotkey")
    return Hotkey{j.at("keys").get<std::vector<std::string>>()};
  if (type == "wait") return Wait{};
  if (type == "terminate")
    return Terminate{status_from_name(j.at("status").get<std::string>())};
  throw CuaError(Err::format_error, "unknown action type: " + type);
}

}  // namespace cua::core
