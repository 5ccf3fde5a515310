#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cua/action.hpp"
#include "cua/types.hpp"

namespace cua::sim {

/// Deterministic desktop stand-in used as the reduction oracle. Replaying a
/// reduced action sequence and replaying the raw events it came from must
/// land in the same state.
struct SimState {
  core::Point pointer{0.5, 0.5};
  std::string focus = "none";
  std::map<std::string, std::string> text;  // per-field buffers keyed by focus
  int scroll_x = 0;
  int scroll_y = 0;
  std::set<std::string> held_modifiers;
  std::vector<std::string> click_log;  // clicks, drags, presses, hotkeys

  bool operator==(const SimState&) const = default;
};

SimState initial_state();

/// Focus key for a click position (quantized so raw jitter and the reduced
/// click land on the same field).
std::string focus_key(core::Point p);

SimState replay(const std::vector<core::AgentAction>& actions, SimState state);
SimState replay_events(const std::vector<core::RawEvent>& events, SimState state,
                       double drag_min_distance);

std::string describe(const SimState& state);

}  // namespace cua::sim
