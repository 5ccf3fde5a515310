#pragma once

#include <filesystem>

#include "cua/reducer.hpp"
#include "cua/trajectory.hpp"
#include "cua/types.hpp"

namespace cua::align {

struct AlignerConfig {
  std::int64_t idle_gap = 300;   // ms of no motion that ends a movement phase
  double diff_threshold = 0.02;  // mean absolute luminance difference
  int downsample_width = 64;
  int downsample_height = 36;
};

/// Mean absolute luminance difference between two frames on the downsampled
/// grid; symmetric, 0 for identical content, 1 for black vs white.
double visual_distance(const core::Frame& a, const core::Frame& b,
                       const AlignerConfig& cfg,
                       const std::filesystem::path& demo_dir);

/// Keyframe choice for one reduced action. Keyboard/scroll/wait actions take
/// the latest frame at or before the span start. Press-initiated actions
/// backtrack to the start of the pre-movement phase and then to the latest
/// frame whose content changed from its predecessor, so the chosen state
/// never leaks the pointer approach or the press itself.
int select_keyframe(const std::vector<core::Frame>& frames,
                    const core::AgentAction& action, reduce::Span span,
                    const std::vector<core::RawEvent>& events,
                    const AlignerConfig& cfg,
                    const std::filesystem::path& demo_dir);

/// Pair every reduced action with its keyframe and append the terminal
/// state with a terminate action carrying the manifest status.
core::Trajectory build_trajectory(const core::RawDemonstration& demo,
                                  const std::vector<reduce::ReducedAction>& reduced,
                                  const AlignerConfig& cfg,
                                  const std::filesystem::path& demo_dir);

}  // namespace cua::align
