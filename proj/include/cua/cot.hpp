#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cua/model_client.hpp"
#include "cua/trajectory.hpp"

namespace cua::cot {

struct CotConfig {
  int retry_limit = 3;
  std::int64_t backoff_ms = 0;  // exponential base; CLI raises it for HTTP
  std::filesystem::path cue_dir;  // visual-cue output; empty = alongside frame
};

/// Judge one step by comparing the before/after keyframes with the action
/// code. Malformed replies are re-asked up to retry_limit (the attempt
/// counter keeps re-asks apart in the response cache).
core::ReflectionVerdict reflect_step(ModelClient& client,
                                     const core::Trajectory& traj, std::size_t i,
                                     const std::filesystem::path& demo_dir,
                                     const CotConfig& cfg);

/// Write the structured three-level CoT for step i. Prior steps contribute
/// their reflections and L1 action lines to the context; coordinate actions
/// additionally carry a visual-cue image.
core::StructuredCoT generate_cot(ModelClient& client, const core::Trajectory& traj,
                                 std::size_t i, const std::filesystem::path& demo_dir,
                                 const CotConfig& cfg);

core::TrajectorySummary summarize_trajectory(ModelClient& client,
                                             const core::Trajectory& traj,
                                             const CotConfig& cfg);

core::PrivacyLevel classify_privacy(ModelClient& client,
                                    const core::Trajectory& traj,
                                    const CotConfig& cfg);

/// Copy of the frame with a red disc at the action coordinate and a 2x
/// magnified patch appended below. Throws cue_not_applicable for actions
/// without coordinates.
std::filesystem::path render_visual_cues(const std::filesystem::path& frame_path,
                                         const core::AgentAction& action,
                                         const std::filesystem::path& out_dir);

/// Full reflector -> generator -> summarizer -> privacy pass over one
/// trajectory. Steps whose annotation fails after retries are left bare and
/// reported in `failures`.
core::Trajectory annotate_trajectory(ModelClient& client, core::Trajectory traj,
                                     const std::filesystem::path& demo_dir,
                                     const CotConfig& cfg,
                                     std::vector<std::string>* failures = nullptr);

// --- training-sample emission -----------------------------------------------

enum class Level { L1, L2, L3 };
std::string level_name(Level level);
Level level_from_name(const std::string& name);

struct SampleConfig {
  Level level = Level::L2;
  int history_images = 3;
  bool drop_flagged_steps = true;
  bool skip_high_privacy = true;
  bool use_refined_instruction = true;
};

struct SampleMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::optional<std::string> content;
  std::optional<std::string> image;
};

struct ChatSample {
  int step = 0;
  Level level = Level::L2;
  std::vector<SampleMessage> messages;
};

/// One sample per eligible step: level-specific system prompt, dialogue
/// history with L1 action lines, screenshots for the most recent steps
/// (flagged steps keep their text but lose their image), the instruction,
/// and the supervised target carrying exactly the level's sections.
std::vector<ChatSample> emit_training_samples(const core::Trajectory& traj,
                                              const SampleConfig& cfg);

std::string sample_to_json(const ChatSample& sample);

const std::string& system_prompt(Level level);

}  // namespace cua::cot
