#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cua/action.hpp"
#include "cua/reducer.hpp"
#include "cua/types.hpp"

namespace cua::core {

/// One compact state-action step: the keyframe observed before the action,
/// the action itself, and the raw-event span it came from. The terminal
/// terminate step uses the virtual one-past-the-end span.
struct Step {
  int frame_index = -1;  // -1 until the aligner fills it
  std::string frame_file;
  AgentAction action;
  reduce::Span span{0, 0};
  std::optional<StructuredCoT> cot;
  std::optional<ReflectionVerdict> verdict;
};

struct Trajectory {
  std::string instruction;
  std::optional<std::string> refined_instruction;
  Os os = Os::ubuntu;
  Resolution resolution;
  TaskStatus status = TaskStatus::success;
  std::vector<Step> steps;
  std::optional<TrajectorySummary> summary;
  std::optional<PrivacyLevel> privacy;
  std::string config_note;  // aligner/reducer parameters, for provenance
};

/// Structural invariants: non-empty, exactly one terminate and it is last,
/// spans ordered and disjoint, keyframe indices strictly increasing (the
/// terminal step may reuse the final frame).
std::vector<std::string> check_trajectory(const Trajectory& traj);

std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& text);

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace cua::core
