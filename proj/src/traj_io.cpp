#include "cua/trajectory.hpp"

#include <json.hpp>

#include "cua/dsl.hpp"
#include "cua/util.hpp"

namespace cua::core {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> check_trajectory(const Trajectory& traj) {
  std::vector<std::string> problems;
  if (traj.steps.empty()) {
    problems.push_back("trajectory has no steps");
    return problems;
  }
  int terminates = 0;
  for (const Step& s : traj.steps)
    if (is_terminate(s.action)) ++terminates;
  if (terminates != 1)
    problems.push_back("expected exactly one terminate, found " +
                       std::to_string(terminates));
  if (!is_terminate(traj.steps.back().action))
    problems.push_back("terminate is not the final step");
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const Step& s = traj.steps[i];
    if (s.span.first > s.span.second)
      problems.push_back("empty span at step " + std::to_string(i));
    if (i > 0) {
      const Step& prev = traj.steps[i - 1];
      bool terminal = i + 1 == traj.steps.size();
      if (s.span.first <= prev.span.second && !terminal)
        problems.push_back("overlapping spans at step " + std::to_string(i));
      if (s.frame_index >= 0 && prev.frame_index >= 0) {
        if (terminal ? s.frame_index < prev.frame_index
                     : s.frame_index <= prev.frame_index)
          problems.push_back("keyframe indices not increasing at step " +
                             std::to_string(i));
      }
    }
    if (auto err = check_action(s.action))
      problems.push_back("step " + std::to_string(i) + ": " + *err);
  }
  return problems;
}

namespace {

ordered_json cot_to_json(const StructuredCoT& cot) {
  ordered_json j;
  if (cot.observation) j["observation"] = *cot.observation;
  if (cot.thought) j["thought"] = *cot.thought;
  j["action_description"] = cot.action_description;
  return j;
}

StructuredCoT cot_from_json(const json& j) {
  StructuredCoT cot;
  if (j.contains("observation")) cot.observation = j.at("observation").get<std::string>();
  if (j.contains("thought")) cot.thought = j.at("thought").get<std::string>();
  cot.action_description = j.at("action_description").get<std::string>();
  return cot;
}

ordered_json verdict_to_json(const ReflectionVerdict& v) {
  ordered_json j;
  j["status"] = verdict_status_name(v.status);
  j["rationale"] = v.rationale;
  if (v.state_change) j["state_change"] = *v.state_change;
  return j;
}

ReflectionVerdict verdict_from_json(const json& j) {
  ReflectionVerdict v;
  std::string status = j.at("status").get<std::string>();
  if (status == "correct") v.status = VerdictStatus::correct;
  else if (status == "incorrect") v.status = VerdictStatus::incorrect;
  else if (status == "redundant") v.status = VerdictStatus::redundant;
  else throw CuaError(Err::format_error, "unknown verdict status: " + status);
  v.rationale = j.value("rationale", "");
  if (j.contains("state_change")) v.state_change = j.at("state_change").get<std::string>();
  return v;
}

}  // namespace

std::string trajectory_to_json(const Trajectory& traj) {
  ordered_json j;
  j["instruction"] = traj.instruction;
  if (traj.refined_instruction) j["refined_instruction"] = *traj.refined_instruction;
  j["os"] = os_name(traj.os);
  j["resolution"] = {{"width", traj.resolution.width},
                     {"height", traj.resolution.height}};
  j["status"] = status_name(traj.status);
  if (!traj.config_note.empty()) j["config"] = traj.config_note;
  if (traj.privacy) j["privacy"] = privacy_name(*traj.privacy);
  if (traj.summary) {
    j["summary"] = {{"refined_instruction", traj.summary->refined_instruction},
                    {"alignment", traj.summary->alignment},
                    {"efficiency", traj.summary->efficiency},
                    {"difficulty", traj.summary->difficulty}};
  }
  j["steps"] = ordered_json::array();
  for (const Step& s : traj.steps) {
    ordered_json step;
    step["action"] = dsl::render_action(s.action);
    step["span"] = {s.span.first, s.span.second};
    step["frame"] = s.frame_index;
    if (!s.frame_file.empty()) step["frame_file"] = s.frame_file;
    if (s.cot) step["cot"] = cot_to_json(*s.cot);
    if (s.verdict) step["verdict"] = verdict_to_json(*s.verdict);
    j["steps"].push_back(std::move(step));
  }
  return j.dump(2) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw CuaError(Err::format_error, "trajectory file is not valid JSON");
  Trajectory traj;
  traj.instruction = j.at("instruction").get<std::string>();
  if (j.contains("refined_instruction"))
    traj.refined_instruction = j.at("refined_instruction").get<std::string>();
  traj.os = os_from_name(j.at("os").get<std::string>());
  traj.resolution.width = j.at("resolution").at("width").get<int>();
  traj.resolution.height = j.at("resolution").at("height").get<int>();
  traj.status = status_from_name(j.value("status", "success"));
  traj.config_note = j.value("config", "");
  if (j.contains("privacy")) traj.privacy = privacy_from_name(j.at("privacy").get<std::string>());
  if (j.contains("summary")) {
    const json& s = j.at("summary");
    traj.summary = TrajectorySummary{
        s.at("refined_instruction").get<std::string>(),
        s.at("alignment").get<int>(), s.at("efficiency").get<int>(),
        s.at("difficulty").get<int>()};
  }
  for (const json& sj : j.at("steps")) {
    Step step;
    step.action = dsl::parse_action(sj.at("action").get<std::string>());
    step.span = {sj.at("span").at(0).get<std::size_t>(),
                 sj.at("span").at(1).get<std::size_t>()};
    step.frame_index = sj.value("frame", -1);
    step.frame_file = sj.value("frame_file", "");
    if (sj.contains("cot")) step.cot = cot_from_json(sj.at("cot"));
    if (sj.contains("verdict")) step.verdict = verdict_from_json(sj.at("verdict"));
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  atomic_write(path, trajectory_to_json(traj));
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  return trajectory_from_json(read_file(path));
}

}  // namespace cua::core
