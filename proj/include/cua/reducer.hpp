#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cua/action.hpp"
#include "cua/types.hpp"

namespace cua::reduce {

struct ReducerConfig {
  std::int64_t double_click_window = 500;  // ms between consecutive downs
  double multi_click_radius = 0.01;        // normalized distance
  double drag_min_distance = 0.005;        // normalized distance
  std::int64_t scroll_merge_gap = 1000;    // ms
  std::int64_t typing_merge_gap = 2000;    // ms
  std::set<std::string> modifier_set = {"ctrl", "shift", "alt", "cmd", "win"};
};

using Span = std::pair<std::size_t, std::size_t>;  // inclusive event indices

struct ReducedAction {
  core::AgentAction action;
  Span span;
  bool operator==(const ReducedAction&) const = default;
};

struct ReduceResult {
  std::vector<ReducedAction> actions;
  std::vector<std::size_t> dropped;  // intermediate move samples etc.
  std::vector<std::string> warnings;
};

/// Compress a raw event stream into the compact action vocabulary: multi
/// clicks and drags are folded into gestures, wheel bursts merge into
/// single-direction scrolls, keystroke runs become write/press/hotkey
/// actions, and mouse movement survives only as the moveTo preceding a
/// click or drag.
ReduceResult reduce(const core::RawDemonstration& demo, const ReducerConfig& cfg);
ReduceResult reduce_events(const std::vector<core::RawEvent>& events,
                           const ReducerConfig& cfg);

std::vector<core::AgentAction> actions_of(const ReduceResult& result);

}  // namespace cua::reduce
