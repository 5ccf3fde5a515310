#include "cua/validate.hpp"

#include <algorithm>
#include <map>

#include "cua/action.hpp"
#include "cua/keys.hpp"

namespace cua::core {

namespace {

std::string at_event(std::size_t i) { return "events[" + std::to_string(i) + "]"; }
std::string at_frame(std::size_t i) { return "frames[" + std::to_string(i) + "]"; }

}  // namespace

std::vector<Finding> validate_demonstration(const RawDemonstration& demo) {
  std::vector<Finding> out;
  auto add = [&](Severity sev, std::string code, std::string msg, std::string loc) {
    out.push_back(Finding{sev, std::move(code), std::move(msg), std::move(loc)});
  };

  if (demo.frames.empty())
    add(Severity::error, "no_frames", "demonstration has no frames", "frames");
  if (demo.resolution.width <= 0 || demo.resolution.height <= 0)
    add(Severity::error, "bad_resolution", "resolution must be positive", "manifest");

  std::int64_t prev_t = INT64_MIN;
  std::map<MouseButton, std::size_t> held_buttons;
  std::map<std::string, std::size_t> held_keys;

  for (std::size_t i = 0; i < demo.events.size(); ++i) {
    const RawEvent& e = demo.events[i];
    if (e.t < prev_t)
      add(Severity::error, "event_order", "timestamp decreases", at_event(i));
    prev_t = std::max(prev_t, e.t);

    bool mouse = e.device == Device::mouse;
    if (mouse && e.kind != EventKind::wheel && !e.pos)
      add(Severity::error, "position_missing", "mouse event lacks position", at_event(i));
    if (!mouse && e.pos)
      add(Severity::error, "position_unexpected", "keyboard event carries position", at_event(i));
    if (!mouse && !e.key)
      add(Severity::error, "key_missing", "keyboard event lacks key", at_event(i));
    if (mouse && e.key)
      add(Severity::error, "key_unexpected", "mouse event carries key", at_event(i));
    if (e.pos && (e.pos->x < 0 || e.pos->x > 1 || e.pos->y < 0 || e.pos->y > 1))
      add(Severity::error, "position_range", "position outside [0,1]", at_event(i));

    switch (e.kind) {
      case EventKind::button_down:
        if (!e.button) {
          add(Severity::error, "button_missing", "button_down lacks button", at_event(i));
        } else if (held_buttons.count(*e.button)) {
          add(Severity::warn, "nested_button", "button_down while already held", at_event(i));
        } else {
          held_buttons[*e.button] = i;
        }
        break;
      case EventKind::button_up:
        if (!e.button) {
          add(Severity::error, "button_missing", "button_up lacks button", at_event(i));
        } else if (!held_buttons.erase(*e.button)) {
          add(Severity::warn, "unmatched_button", "button_up without matching down", at_event(i));
        }
        break;
      case EventKind::wheel:
        if (!e.wheel)
          add(Severity::error, "wheel_missing", "wheel event lacks deltas", at_event(i));
        break;
      case EventKind::key_down:
        if (e.key) {
          std::string k = keys::canonical(*e.key);
          if (held_keys.count(k))
            add(Severity::warn, "nested_key", "key_down while already held: " + k, at_event(i));
          else
            held_keys[k] = i;
        }
        break;
      case EventKind::key_up:
        if (e.key) {
          std::string k = keys::canonical(*e.key);
          if (!held_keys.erase(k))
            add(Severity::warn, "unmatched_key", "key_up without matching down: " + k, at_event(i));
        }
        break;
      case EventKind::move:
        break;
    }
  }

  for (const auto& [button, idx] : held_buttons)
    add(Severity::warn, "unmatched_button",
        "button_down never released: " + button_name(button), at_event(idx));
  for (const auto& [key, idx] : held_keys)
    add(Severity::warn, "unmatched_key", "key_down never released: " + key, at_event(idx));

  std::int64_t prev_frame_t = INT64_MIN;
  int prev_index = -1;
  for (std::size_t i = 0; i < demo.frames.size(); ++i) {
    const Frame& f = demo.frames[i];
    if (f.t <= prev_frame_t)
      add(Severity::error, "frame_order", "frame timestamps must strictly increase", at_frame(i));
    if (f.index <= prev_index)
      add(Severity::error, "frame_index", "frame indices must strictly increase", at_frame(i));
    if (f.width <= 0 || f.height <= 0)
      add(Severity::error, "frame_dims", "frame dimensions must be positive", at_frame(i));
    prev_frame_t = std::max(prev_frame_t, f.t);
    prev_index = std::max(prev_index, f.index);
  }

  return out;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::error; });
}

}  // namespace cua::core
