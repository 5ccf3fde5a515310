#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cua/action.hpp"
#include "cua/trajectory.hpp"
#include "cua/types.hpp"

namespace cua::bench {

struct BBox {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  bool contains(core::Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

enum class ScrollDirection { up, down, left, right };
std::string scroll_direction_name(ScrollDirection d);
ScrollDirection scroll_direction_from_name(const std::string& name);

/// One annotator-approved acceptable action at a benchmark step, with its
/// matcher parameters.
struct GoldOption {
  core::ActionKind kind = core::ActionKind::click;
  // Coordinate kinds (click family, moveTo, dragTo); also scroll.
  std::optional<BBox> bbox;
  core::MouseButton button = core::MouseButton::left;
  // write
  std::string target_text;
  double max_edit_distance = 0.1;  // normalized bound, inclusive
  bool case_sensitive = true;
  // press / hotkey
  std::vector<std::string> keys;
  // scroll
  ScrollDirection direction = ScrollDirection::down;
  // terminate
  core::TaskStatus status = core::TaskStatus::success;
};

struct BenchStep {
  std::string screenshot;
  std::vector<GoldOption> options;  // non-empty, disjunctive
};

struct BenchTask {
  std::string id;
  std::string instruction;
  core::Os os = core::Os::ubuntu;
  core::Resolution resolution;
  std::vector<BenchStep> steps;
};

enum class Category { coord, content, function };
std::string category_name(Category c);

struct MatchConfig {
  bool check_terminate_status = true;
};

struct StepResult {
  int step_index = 0;
  std::optional<core::AgentAction> predicted;  // nullopt = no_action
  std::optional<int> matched_option;
  bool success = false;
  Category category = Category::coord;
};

struct TaskResult {
  std::string task_id;
  std::vector<StepResult> steps;
  bool task_success = false;  // every step matched
};

struct EvalReport {
  std::vector<TaskResult> tasks;
  std::map<std::string, int> action_counts;  // gold action kinds
  double coord_sr = 0, content_sr = 0, function_sr = 0, avg_sr = 0;
  int coord_total = 0, content_total = 0, function_total = 0;
  int coord_hits = 0, content_hits = 0, function_hits = 0;
};

struct RunMatrix {
  std::string step_budget;            // label, e.g. "15"
  std::vector<std::vector<bool>> runs;  // rows = runs, columns = tasks
};

/// Table-driven step matcher. A step succeeds when any gold option matches
/// under its kind-specific rule; kind mismatches are failures, not errors.
StepResult match_step(const std::optional<core::AgentAction>& predicted,
                      const std::vector<GoldOption>& options,
                      const MatchConfig& cfg, int step_index = 0);

Category category_of(core::ActionKind kind);

/// Levenshtein distance (unit costs).
std::size_t edit_distance(const std::string& a, const std::string& b);
/// Levenshtein / max(len) in [0,1]; 0 for two empty strings.
double normalized_edit_distance(const std::string& a, const std::string& b);

/// Per-step scoring of raw response texts against one task. Unparseable
/// responses score as failures with no action recorded.
std::vector<StepResult> evaluate_task(const BenchTask& task,
                                      const std::vector<std::string>& responses,
                                      const MatchConfig& cfg);

EvalReport evaluate_benchmark(
    const std::vector<BenchTask>& tasks,
    const std::map<std::string, std::vector<std::string>>& predictions,
    const MatchConfig& cfg);

/// Fraction (x100) of tasks solved at least once in the first n runs.
double pass_at_n(const RunMatrix& matrix, int n);
/// Mean per-run success rate (x100) — the run-averaging mode.
double run_average(const RunMatrix& matrix);
double run_average(const std::vector<double>& per_run_sr);

struct CorpusStats {
  int total_tasks = 0;
  double avg_steps = 0;
  std::map<std::string, int> action_counts;
  std::map<std::string, double> action_percentages;
  std::map<std::string, std::map<std::string, int>> per_os_counts;
  std::map<std::string, std::map<std::string, double>> per_os_percentages;
};

CorpusStats corpus_stats_tasks(const std::vector<BenchTask>& tasks);
CorpusStats corpus_stats_trajectories(const std::vector<core::Trajectory>& trajs);

/// Re-derives every aggregate from the raw step results and compares.
bool report_is_consistent(const EvalReport& report);

std::string report_to_markdown(const EvalReport& report);
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
bool reports_equal(const EvalReport& a, const EvalReport& b);

std::string run_matrix_to_markdown(const RunMatrix& matrix, int n);
std::string stats_to_markdown(const CorpusStats& stats);
std::string stats_to_json(const CorpusStats& stats);

// bench.json / preds.jsonl / runs.json I/O
std::vector<BenchTask> load_bench(const std::filesystem::path& path);
void save_bench(const std::vector<BenchTask>& tasks, const std::filesystem::path& path);
std::map<std::string, std::vector<std::string>> load_predictions(
    const std::filesystem::path& path);
void save_predictions(const std::map<std::string, std::vector<std::string>>& preds,
                      const std::filesystem::path& path);
RunMatrix load_run_matrix(const std::filesystem::path& path);
void save_run_matrix(const RunMatrix& matrix, const std::filesystem::path& path);

}  // namespace cua::bench
