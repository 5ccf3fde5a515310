#include "cua/cot.hpp"

#include <algorithm>
#include <thread>

#include <json.hpp>

#include "cua/dsl.hpp"
#include "cua/image.hpp"
#include "cua/util.hpp"

namespace cua::cot {

using core::AgentAction;
using core::StructuredCoT;
using core::Trajectory;
using nlohmann::ordered_json;

namespace {

const std::string kFunctionCatalog =
    "Finally, output the action as PyAutoGUI code or one of these functions:\n"
    "- {\"name\": \"computer.triple_click\", \"description\": \"Triple click at a position\", "
    "\"parameters\": {\"x\": \"normalized x coordinate\", \"y\": \"normalized y coordinate\"}}\n"
    "- {\"name\": \"computer.terminate\", \"description\": \"End the task and report its outcome\", "
    "\"parameters\": {\"status\": \"'success' or 'failure'\"}}";

const std::string kActionRules =
    "Action: one clear, actionable sentence. Name the target element without "
    "coordinates, describe it by label or appearance, and for keyboard input "
    "state the exact text or key combination with repeat counts consolidated.\n";

const std::string kThoughtRules =
    "Thought: assess progress so far, note anything unexpected on screen and "
    "how to recover, weigh the plausible next actions, and commit to the most "
    "reasonable one in first person.\n";

const std::string kObservationRules =
    "Observation: describe the current screen in detail — the active "
    "application and window, the key controls, any dialogs or notifications, "
    "and everything relevant to the task goal.\n";

const std::string kPreamble =
    "You are a GUI agent. You are given a task, a screenshot of the screen, "
    "and the steps completed so far. You produce the next step. For each step, "
    "respond in this format:\n";

const std::string kSystemL1 = kPreamble + kActionRules + kFunctionCatalog;
const std::string kSystemL2 = kPreamble + kThoughtRules + kActionRules + kFunctionCatalog;
const std::string kSystemL3 =
    kPreamble + kObservationRules + kThoughtRules + kActionRules + kFunctionCatalog;

const std::string kReflectorSystem =
    "You are the reflector. Compare the screenshots before and after the "
    "action against its code and decide whether the step was correct, "
    "incorrect, or redundant. Reply with exactly these tags:\n"
    "<verdict>correct|incorrect|redundant</verdict>\n"
    "<rationale>why</rationale>\n"
    "<state_change>what the action changed (required when correct)</state_change>";

const std::string kGeneratorSystem =
    "You are the generator. Using the task goal, the action history with its "
    "reflections, the current screenshot (with a visual cue for coordinate "
    "actions), and the action code, write the structured reasoning. Reply "
    "with exactly these tags:\n"
    "<observation>what the screen shows</observation>\n"
    "<thought>reflective reasoning toward the action</thought>\n"
    "<action_description>one sentence describing the action</action_description>";

const std::string kSummarizerSystem =
    "You are the summarizer. Refine the user-written goal into a precise "
    "instruction and score the whole trajectory. Reply with exactly these tags:\n"
    "<refined_instruction>text</refined_instruction>\n"
    "<score_alignment>1-10</score_alignment>\n"
    "<score_efficiency>1-10</score_efficiency>\n"
    "<score_difficulty>1-10</score_difficulty>";

const std::string kPrivacySystem =
    "You are the privacy screener. Judge how sensitive the recorded content "
    "is. Reply with exactly one tag:\n<privacy>None|Low|Medium|High</privacy>";

std::optional<std::string> extract_tag(const std::string& reply,
                                       const std::string& tag) {
  std::string open = "<" + tag + ">";
  std::string close = "</" + tag + ">";
  std::size_t a = reply.find(open);
  if (a == std::string::npos) return std::nullopt;
  a += open.size();
  std::size_t b = reply.find(close, a);
  if (b == std::string::npos) return std::nullopt;
  std::string value = reply.substr(a, b - a);
  std::size_t begin = value.find_first_not_of(" \t\r\n");
  std::size_t end = value.find_last_not_of(" \t\r\n");
  if (begin == std::string::npos) return std::string();
  return value.substr(begin, end - begin + 1);
}

template <typename Parse>
auto ask(ModelClient& client, ChatRequest request, const CotConfig& cfg,
         Parse parse) {
  int limit = std::max(1, cfg.retry_limit);
  std::optional<CuaError> last;
  for (int attempt = 1; attempt <= limit; ++attempt) {
    request.attempt = attempt;
    if (attempt > 1 && cfg.backoff_ms > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg.backoff_ms << (attempt - 2)));
    std::string reply;
    try {
      reply = client.complete(request);
    } catch (const CuaError& e) {
      last = CuaError(Err::backend_error, e.what());
      continue;
    }
    try {
      return parse(reply);
    } catch (const CuaError& e) {
      last = e;
      continue;
    }
  }
  throw *last;
}

std::string frame_path(const std::filesystem::path& demo_dir,
                       const core::Step& step) {
  return (demo_dir / step.frame_file).string();
}

std::string history_line_text(const core::Step& step, std::size_t index) {
  std::string desc = step.cot ? step.cot->action_description
                              : dsl::render_action(step.action);
  return "# Step " + std::to_string(index + 1) + ":\n## Action:" + desc;
}

}  // namespace

const std::string& system_prompt(Level level) {
  switch (level) {
    case Level::L1: return kSystemL1;
    case Level::L2: return kSystemL2;
    case Level::L3: return kSystemL3;
  }
  return kSystemL2;
}

std::string level_name(Level level) {
  switch (level) {
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
  }
  return "L2";
}

Level level_from_name(const std::string& name) {
  if (name == "L1" || name == "l1") return Level::L1;
  if (name == "L2" || name == "l2") return Level::L2;
  if (name == "L3" || name == "l3") return Level::L3;
  throw CuaError(Err::input_error, "unknown CoT level: " + name);
}

core::ReflectionVerdict reflect_step(ModelClient& client, const Trajectory& traj,
                                     std::size_t i,
                                     const std::filesystem::path& demo_dir,
                                     const CotConfig& cfg) {
  if (i >= traj.steps.size())
    throw CuaError(Err::input_error, "step index out of range");
  const core::Step& step = traj.steps[i];
  bool terminal = i + 1 == traj.steps.size();
  const core::Step& after = terminal ? step : traj.steps[i + 1];

  ChatRequest request;
  request.purpose = "reflector";
  request.system = kReflectorSystem;
  ChatMessage m;
  m.role = "user";
  m.text = "Task: " + traj.instruction + "\nStep " + std::to_string(i + 1) +
           " of " + std::to_string(traj.steps.size()) +
           "\nAction code: " + dsl::render_action(step.action) +
           "\nThe first image is the state before the action, the second the "
           "state after.";
  m.images = {frame_path(demo_dir, step), frame_path(demo_dir, after)};
  request.messages.push_back(std::move(m));

  return ask(client, std::move(request), cfg, [](const std::string& reply) {
    auto verdict = extract_tag(reply, "verdict");
    if (!verdict) throw CuaError(Err::verdict_parse_error, "missing <verdict>");
    core::ReflectionVerdict out;
    if (*verdict == "correct") out.status = core::VerdictStatus::correct;
    else if (*verdict == "incorrect") out.status = core::VerdictStatus::incorrect;
    else if (*verdict == "redundant") out.status = core::VerdictStatus::redundant;
    else throw CuaError(Err::verdict_parse_error, "unknown verdict: " + *verdict);
    out.rationale = extract_tag(reply, "rationale").value_or("");
    auto change = extract_tag(reply, "state_change");
    if (out.status == core::VerdictStatus::correct) {
      if (!change || change->empty())
        throw CuaError(Err::verdict_parse_error,
                       "correct verdict requires <state_change>");
      out.state_change = *change;
    } else if (out.rationale.empty()) {
      throw CuaError(Err::verdict_parse_error,
                     "non-correct verdict requires a rationale");
    }
    return out;
  });
}

std::filesystem::path render_visual_cues(const std::filesystem::path& frame_file,
                                         const AgentAction& action,
                                         const std::filesystem::path& out_dir) {
  auto point = core::action_point(action);
  if (!point)
    throw CuaError(Err::cue_not_applicable,
                   "action carries no coordinates: " + dsl::render_action(action));
  img::Image frame = img::load_image(frame_file);
  img::Image marked = img::to_rgb(frame);
  int cx = std::min(marked.width - 1, int(point->x * marked.width));
  int cy = std::min(marked.height - 1, int(point->y * marked.height));
  int radius = std::max(2, std::min(marked.width, marked.height) / 24);
  img::draw_disc(marked, cx, cy, radius, 255, 0, 0);
  int side = std::max(8, std::min(marked.width, marked.height) / 2);
  img::Image crop = img::magnify_crop(marked, cx, cy, side, 2);
  img::Image out = img::stack_vertical(marked, crop);

  std::filesystem::path dir =
      out_dir.empty() ? frame_file.parent_path() : out_dir;
  std::filesystem::create_directories(dir);
  std::filesystem::path target =
      dir / (frame_file.stem().string() + "_cue.ppm");
  img::save_image(out, target);
  return target;
}

core::StructuredCoT generate_cot(ModelClient& client, const Trajectory& traj,
                                 std::size_t i,
                                 const std::filesystem::path& demo_dir,
                                 const CotConfig& cfg) {
  if (i >= traj.steps.size())
    throw CuaError(Err::input_error, "step index out of range");
  const core::Step& step = traj.steps[i];

  ChatRequest request;
  request.purpose = "generator";
  request.system = kGeneratorSystem;
  for (std::size_t j = 0; j < i; ++j) {
    const core::Step& prior = traj.steps[j];
    ChatMessage m;
    m.role = "user";
    m.text = history_line_text(prior, j);
    if (prior.verdict) {
      m.text += "\nReflection: " + core::verdict_status_name(prior.verdict->status);
      if (prior.verdict->state_change) m.text += " — " + *prior.verdict->state_change;
      else if (!prior.verdict->rationale.empty())
        m.text += " — " + prior.verdict->rationale;
    }
    request.messages.push_back(std::move(m));
  }
  ChatMessage current;
  current.role = "user";
  current.text = "Task: " + traj.instruction +
                 "\nAction code: " + dsl::render_action(step.action) +
                 "\nWrite the structured reasoning for this step.";
  current.images.push_back(frame_path(demo_dir, step));
  if (core::action_point(step.action)) {
    auto cue = render_visual_cues(demo_dir / step.frame_file, step.action,
                                  cfg.cue_dir);
    current.images.push_back(cue.string());
  }
  request.messages.push_back(std::move(current));

  return ask(client, std::move(request), cfg, [](const std::string& reply) {
    auto desc = extract_tag(reply, "action_description");
    if (!desc || desc->empty())
      throw CuaError(Err::verdict_parse_error, "missing <action_description>");
    StructuredCoT cot;
    cot.action_description = *desc;
    if (auto thought = extract_tag(reply, "thought"); thought && !thought->empty())
      cot.thought = *thought;
    if (auto obs = extract_tag(reply, "observation"); obs && !obs->empty()) {
      if (!cot.thought)
        throw CuaError(Err::verdict_parse_error,
                       "observation without thought breaks the level ladder");
      cot.observation = *obs;
    }
    return cot;
  });
}

core::TrajectorySummary summarize_trajectory(ModelClient& client,
                                             const Trajectory& traj,
                                             const CotConfig& cfg) {
  ChatRequest request;
  request.purpose = "summarizer";
  request.system = kSummarizerSystem;
  ChatMessage m;
  m.role = "user";
  std::string lines;
  for (std::size_t i = 0; i < traj.steps.size(); ++i)
    lines += history_line_text(traj.steps[i], i) + "\n";
  m.text = "Task: " + traj.instruction + "\nSteps:\n" + lines;
  request.messages.push_back(std::move(m));

  return ask(client, std::move(request), cfg, [](const std::string& reply) {
    auto refined = extract_tag(reply, "refined_instruction");
    if (!refined || refined->empty())
      throw CuaError(Err::verdict_parse_error, "missing <refined_instruction>");
    core::TrajectorySummary summary;
    summary.refined_instruction = *refined;
    auto score = [&](const char* tag) {
      auto v = extract_tag(reply, tag);
      if (!v) throw CuaError(Err::verdict_parse_error, std::string("missing <") + tag + ">");
      int value;
      try {
        value = std::stoi(*v);
      } catch (...) {
        throw CuaError(Err::verdict_parse_error, std::string("bad score in <") + tag + ">");
      }
      if (value < 1 || value > 10)
        throw CuaError(Err::verdict_parse_error,
                       std::string("score out of range in <") + tag + ">");
      return value;
    };
    summary.alignment = score("score_alignment");
    summary.efficiency = score("score_efficiency");
    summary.difficulty = score("score_difficulty");
    return summary;
  });
}

core::PrivacyLevel classify_privacy(ModelClient& client, const Trajectory& traj,
                                    const CotConfig& cfg) {
  ChatRequest request;
  request.purpose = "privacy";
  request.system = kPrivacySystem;
  ChatMessage m;
  m.role = "user";
  std::string lines;
  for (std::size_t i = 0; i < traj.steps.size(); ++i)
    lines += history_line_text(traj.steps[i], i) + "\n";
  m.text = "Task: " + traj.instruction + "\nSteps:\n" + lines;
  request.messages.push_back(std::move(m));

  return ask(client, std::move(request), cfg, [](const std::string& reply) {
    auto level = extract_tag(reply, "privacy");
    if (!level) throw CuaError(Err::verdict_parse_error, "missing <privacy>");
    return core::privacy_from_name(*level);  // throws on unknown labels
  });
}

Trajectory annotate_trajectory(ModelClient& client, Trajectory traj,
                               const std::filesystem::path& demo_dir,
                               const CotConfig& cfg,
                               std::vector<std::string>* failures) {
  auto note = [&](std::size_t i, const char* stage, const CuaError& e) {
    if (failures)
      failures->push_back("step " + std::to_string(i) + " " + stage + ": " + e.what());
  };
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    try {
      traj.steps[i].verdict = reflect_step(client, traj, i, demo_dir, cfg);
    } catch (const CuaError& e) {
      note(i, "reflect", e);
    }
  }
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    try {
      traj.steps[i].cot = generate_cot(client, traj, i, demo_dir, cfg);
    } catch (const CuaError& e) {
      note(i, "generate", e);
    }
  }
  try {
    traj.summary = summarize_trajectory(client, traj, cfg);
    traj.refined_instruction = traj.summary->refined_instruction;
  } catch (const CuaError& e) {
    note(traj.steps.size(), "summarize", e);
  }
  try {
    traj.privacy = classify_privacy(client, traj, cfg);
  } catch (const CuaError& e) {
    note(traj.steps.size(), "privacy", e);
  }
  return traj;
}

// --- emission ----------------------------------------------------------------

namespace {

bool flagged(const core::Step& step) {
  return step.verdict && step.verdict->status != core::VerdictStatus::correct;
}

std::string target_text(const core::Step& step, Level level, std::size_t index) {
  const StructuredCoT& cot = *step.cot;
  std::string out = "# Step " + std::to_string(index + 1) + ":\n";
  if (level == Level::L3) {
    if (!cot.observation)
      throw CuaError(Err::emission_error,
                     "step " + std::to_string(index) + " lacks L3 observation");
    out += "## Observation:" + *cot.observation + "\n\n";
  }
  if (level == Level::L3 || level == Level::L2) {
    if (!cot.thought)
      throw CuaError(Err::emission_error,
                     "step " + std::to_string(index) + " lacks L2 thought");
    out += "## Thought:" + *cot.thought + "\n\n";
  }
  out += "## Action:" + cot.action_description + "\n\n";
  out += "## Code:\n```python\n" + dsl::render_action(step.action) + "\n```";
  return out;
}

}  // namespace

std::vector<ChatSample> emit_training_samples(const Trajectory& traj,
                                              const SampleConfig& cfg) {
  if (cfg.history_images < 1)
    throw CuaError(Err::input_error, "history_images must be >= 1");
  std::vector<ChatSample> samples;
  if (cfg.skip_high_privacy && traj.privacy &&
      *traj.privacy == core::PrivacyLevel::high)
    return samples;

  const std::string& instruction =
      cfg.use_refined_instruction && traj.refined_instruction
          ? *traj.refined_instruction
          : traj.instruction;

  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const core::Step& step = traj.steps[i];
    if (cfg.drop_flagged_steps && flagged(step)) continue;
    if (!step.cot)
      throw CuaError(Err::emission_error,
                     "step " + std::to_string(i) + " has no CoT for emission");

    ChatSample sample;
    sample.step = int(i);
    sample.level = cfg.level;
    sample.messages.push_back(
        SampleMessage{"system", system_prompt(cfg.level), std::nullopt});

    std::size_t window = std::min<std::size_t>(std::size_t(cfg.history_images), i + 1);
    std::size_t first_imaged = i + 1 - window;

    std::string buffer;
    auto flush_buffer = [&]() {
      if (buffer.empty()) return;
      sample.messages.push_back(SampleMessage{"assistant", buffer, std::nullopt});
      buffer.clear();
    };
    for (std::size_t j = 0; j < i; ++j) {
      const core::Step& prior = traj.steps[j];
      bool carries_image = j >= first_imaged && !flagged(prior);
      if (carries_image) {
        flush_buffer();
        sample.messages.push_back(
            SampleMessage{"user", std::nullopt, prior.frame_file});
      }
      std::string line = history_line_text(prior, j);
      buffer = buffer.empty() ? line : buffer + "\n\n" + line;
    }
    flush_buffer();
    sample.messages.push_back(SampleMessage{"user", std::nullopt, step.frame_file});
    sample.messages.push_back(SampleMessage{
        "user",
        "# Task Instruction:\n" + instruction +
            "\nProduce the next move from the current screenshot, the task "
            "instruction, and the previous steps (when provided).",
        std::nullopt});
    sample.messages.push_back(
        SampleMessage{"assistant", target_text(step, cfg.level, i), std::nullopt});
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::string sample_to_json(const ChatSample& sample) {
  ordered_json j;
  j["step"] = sample.step;
  j["level"] = level_name(sample.level);
  j["messages"] = ordered_json::array();
  for (const SampleMessage& m : sample.messages) {
    ordered_json mj;
    mj["role"] = m.role;
    if (m.content) mj["content"] = *m.content;
    if (m.image) mj["image"] = *m.image;
    j["messages"].push_back(std::move(mj));
  }
  return j.dump();
}

}  // namespace cua::cot
