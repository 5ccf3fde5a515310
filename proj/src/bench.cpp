#include "cua/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cua/dsl.hpp"
#include "cua/keys.hpp"
#include "cua/util.hpp"

namespace cua::bench {

using core::ActionKind;
using core::AgentAction;
using nlohmann::json;
using nlohmann::ordered_json;

std::string scroll_direction_name(ScrollDirection d) {
  switch (d) {
    case ScrollDirection::up: return "up";
    case ScrollDirection::down: return "down";
    case ScrollDirection::left: return "left";
    case ScrollDirection::right: return "right";
  }
  return "down";
}

ScrollDirection scroll_direction_from_name(const std::string& name) {
  if (name == "up") return ScrollDirection::up;
  if (name == "down") return ScrollDirection::down;
  if (name == "left") return ScrollDirection::left;
  if (name == "right") return ScrollDirection::right;
  throw CuaError(Err::format_error, "unknown scroll direction: " + name);
}

std::string category_name(Category c) {
  switch (c) {
    case Category::coord: return "coord";
    case Category::content: return "content";
    case Category::function: return "function";
  }
  return "coord";
}

Category category_of(ActionKind kind) {
  switch (kind) {
    case ActionKind::click:
    case ActionKind::middle_click:
    case ActionKind::double_click:
    case ActionKind::triple_click:
    case ActionKind::move_to:
    case ActionKind::drag_to:
    case ActionKind::scroll:
    case ActionKind::hscroll:
      return Category::coord;
    case ActionKind::write:
    case ActionKind::press:
    case ActionKind::hotkey:
      return Category::content;
    case ActionKind::wait:
    case ActionKind::terminate:
      return Category::function;
  }
  return Category::coord;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double normalized_edit_distance(const std::string& a, const std::string& b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return double(edit_distance(a, b)) / double(longest);
}

namespace {

bool option_matches(const AgentAction& predicted, const GoldOption& gold,
                    const MatchConfig& cfg) {
  ActionKind pk = core::action_kind(predicted);
  switch (gold.kind) {
    case ActionKind::click: {
      if (pk != ActionKind::click) return false;
      const auto& c = std::get<core::Click>(predicted);
      if (c.button != gold.button) return false;
      return gold.bbox && gold.bbox->contains({c.x, c.y});
    }
    case ActionKind::middle_click: {
      if (pk != ActionKind::middle_click) return false;
      const auto& c = std::get<core::MiddleClick>(predicted);
      return gold.bbox && gold.bbox->contains({c.x, c.y});
    }
    case ActionKind::double_click: {
      if (pk != ActionKind::double_click) return false;
      const auto& c = std::get<core::DoubleClick>(predicted);
      if (c.button != gold.button) return false;
      return gold.bbox && gold.bbox->contains({c.x, c.y});
    }
    case ActionKind::triple_click: {
      if (pk != ActionKind::triple_click) return false;
      const auto& c = std::get<core::TripleClick>(predicted);
      if (c.button != gold.button) return false;
      return gold.bbox && gold.bbox->contains({c.x, c.y});
    }
    case ActionKind::move_to: {
      if (pk != ActionKind::move_to) return false;
      const auto& c = std::get<core::MoveTo>(predicted);
      return gold.bbox && gold.bbox->contains({c.x, c.y});
    }
    case ActionKind::drag_to: {
      if (pk != ActionKind::drag_to) return false;
      const auto& c = std::get<core::DragTo>(predicted);
      return gold.bbox && gold.bbox->contains({c.x, c.y});
    }
    case ActionKind::scroll:
    case ActionKind::hscroll: {
      // Gold scroll options carry a direction; the axis decides which
      // predicted kind can match. Direction must be exact, and the output
      // coordinates must fall inside the box.
      bool vertical = gold.direction == ScrollDirection::up ||
                      gold.direction == ScrollDirection::down;
      std::optional<core::Point> pos;
      bool sign_ok = false;
      if (vertical && pk == ActionKind::scroll) {
        const auto& s = std::get<core::Scroll>(predicted);
        sign_ok = gold.direction == ScrollDirection::down ? s.dy < 0 : s.dy > 0;
        pos = s.pos;
      } else if (!vertical && pk == ActionKind::hscroll) {
        const auto& s = std::get<core::HScroll>(predicted);
        sign_ok = gold.direction == ScrollDirection::left ? s.dx < 0 : s.dx > 0;
        pos = s.pos;
      } else {
        return false;
      }
      if (!sign_ok) return false;
      if (!gold.bbox) return false;
      return pos && gold.bbox->contains(*pos);
    }
    case ActionKind::write: {
      if (pk != ActionKind::write) return false;
      const auto& w = std::get<core::Write>(predicted);
      std::string a = w.text, b = gold.target_text;
      if (!gold.case_sensitive) {
        a = to_lower(a);
        b = to_lower(b);
      }
      return normalized_edit_distance(a, b) <= gold.max_edit_distance;
    }
    case ActionKind::press: {
      if (pk != ActionKind::press) return false;
      const auto& p = std::get<core::Press>(predicted);
      return gold.keys.size() == 1 && keys::canonical(gold.keys[0]) == p.key;
    }
    case ActionKind::hotkey: {
      if (pk != ActionKind::hotkey) return false;
      const auto& h = std::get<core::Hotkey>(predicted);
      return keys::canonical_hotkey(gold.keys) == h.keys;
    }
    case ActionKind::terminate: {
      if (pk != ActionKind::terminate) return false;
      if (!cfg.check_terminate_status) return true;
      return std::get<core::Terminate>(predicted).status == gold.status;
    }
    case ActionKind::wait:
      return pk == ActionKind::wait;
  }
  return false;
}

}  // namespace

StepResult match_step(const std::optional<AgentAction>& predicted,
                      const std::vector<GoldOption>& options,
                      const MatchConfig& cfg, int step_index) {
  if (options.empty())
    throw CuaError(Err::input_error, "step has no gold options");
  StepResult result;
  result.step_index = step_index;
  result.predicted = predicted;
  result.category = category_of(options[0].kind);
  if (!predicted) return result;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (option_matches(*predicted, options[i], cfg)) {
      result.success = true;
      result.matched_option = int(i);
      break;
    }
  }
  return result;
}

std::vector<StepResult> evaluate_task(const BenchTask& task,
                                      const std::vector<std::string>& responses,
                                      const MatchConfig& cfg) {
  if (responses.size() != task.steps.size())
    throw CuaError(Err::input_error,
                   "task " + task.id + ": " + std::to_string(responses.size()) +
                       " predictions for " + std::to_string(task.steps.size()) +
                       " steps");
  std::vector<StepResult> results;
  for (std::size_t i = 0; i < task.steps.size(); ++i) {
    std::optional<AgentAction> predicted;
    try {
      predicted = dsl::extract_response(responses[i], task.resolution).action;
    } catch (const CuaError&) {
      predicted = std::nullopt;  // scores as a failed step
    }
    results.push_back(match_step(predicted, task.steps[i].options, cfg, int(i)));
  }
  return results;
}

EvalReport evaluate_benchmark(
    const std::vector<BenchTask>& tasks,
    const std::map<std::string, std::vector<std::string>>& predictions,
    const MatchConfig& cfg) {
  EvalReport report;
  for (const BenchTask& task : tasks) {
    auto it = predictions.find(task.id);
    if (it == predictions.end())
      throw CuaError(Err::input_error, "no predictions for task " + task.id);
    TaskResult tr;
    tr.task_id = task.id;
    tr.steps = evaluate_task(task, it->second, cfg);
    tr.task_success = std::all_of(tr.steps.begin(), tr.steps.end(),
                                  [](const StepResult& s) { return s.success; });
    for (const BenchStep& step : task.steps)
      report.action_counts[core::action_kind_name(step.options[0].kind)] += 1;
    for (const StepResult& s : tr.steps) {
      int* total = nullptr;
      int* hits = nullptr;
      switch (s.category) {
        case Category::coord: total = &report.coord_total; hits = &report.coord_hits; break;
        case Category::content: total = &report.content_total; hits = &report.content_hits; break;
        case Category::function: total = &report.function_total; hits = &report.function_hits; break;
      }
      *total += 1;
      if (s.success) *hits += 1;
    }
    report.tasks.push_back(std::move(tr));
  }
  std::sort(report.tasks.begin(), report.tasks.end(),
            [](const TaskResult& a, const TaskResult& b) { return a.task_id < b.task_id; });
  auto rate = [](int hits, int total) {
    return total > 0 ? 100.0 * hits / total : 0.0;
  };
  report.coord_sr = rate(report.coord_hits, report.coord_total);
  report.content_sr = rate(report.content_hits, report.content_total);
  report.function_sr = rate(report.function_hits, report.function_total);
  int total = report.coord_total + report.content_total + report.function_total;
  int hits = report.coord_hits + report.content_hits + report.function_hits;
  report.avg_sr = rate(hits, total);
  return report;
}

namespace {

void check_matrix(const RunMatrix& matrix) {
  if (matrix.runs.empty())
    throw CuaError(Err::input_error, "run matrix has no runs");
  std::size_t cols = matrix.runs[0].size();
  if (cols == 0) throw CuaError(Err::input_error, "run matrix has no tasks");
  for (const auto& row : matrix.runs)
    if (row.size() != cols)
      throw CuaError(Err::input_error, "run matrix is not rectangular");
}

}  // namespace

double pass_at_n(const RunMatrix& matrix, int n) {
  check_matrix(matrix);
  if (n < 1 || std::size_t(n) > matrix.runs.size())
    throw CuaError(Err::input_error, "n out of range: " + std::to_string(n));
  std::size_t cols = matrix.runs[0].size();
  int solved = 0;
  for (std::size_t task = 0; task < cols; ++task) {
    for (int run = 0; run < n; ++run) {
      if (matrix.runs[std::size_t(run)][task]) {
        ++solved;
        break;
      }
    }
  }
  return 100.0 * solved / double(cols);
}

double run_average(const RunMatrix& matrix) {
  check_matrix(matrix);
  std::vector<double> srs;
  for (const auto& row : matrix.runs) {
    int hits = 0;
    for (bool b : row) hits += b ? 1 : 0;
    srs.push_back(100.0 * hits / double(row.size()));
  }
  return run_average(srs);
}

double run_average(const std::vector<double>& per_run_sr) {
  if (per_run_sr.empty())
    throw CuaError(Err::input_error, "no runs to average");
  double sum = 0;
  for (double v : per_run_sr) sum += v;
  return sum / double(per_run_sr.size());
}

namespace {

CorpusStats stats_from_counts(
    int total_tasks, double avg_steps,
    const std::map<std::string, std::map<std::string, int>>& per_os) {
  CorpusStats stats;
  stats.total_tasks = total_tasks;
  stats.avg_steps = avg_steps;
  stats.per_os_counts = per_os;
  int grand_total = 0;
  for (const auto& [os, counts] : per_os)
    for (const auto& [kind, count] : counts) {
      stats.action_counts[kind] += count;
      grand_total += count;
    }
  for (const auto& [kind, count] : stats.action_counts)
    stats.action_percentages[kind] = grand_total ? 100.0 * count / grand_total : 0.0;
  for (const auto& [os, counts] : per_os) {
    int os_total = 0;
    for (const auto& [kind, count] : counts) os_total += count;
    for (const auto& [kind, count] : counts)
      stats.per_os_percentages[os][kind] = os_total ? 100.0 * count / os_total : 0.0;
  }
  return stats;
}

}  // namespace

CorpusStats corpus_stats_tasks(const std::vector<BenchTask>& tasks) {
  if (tasks.empty()) throw CuaError(Err::input_error, "empty corpus");
  std::map<std::string, std::map<std::string, int>> per_os;
  std::size_t steps = 0;
  for (const BenchTask& t : tasks) {
    steps += t.steps.size();
    for (const BenchStep& s : t.steps)
      per_os[core::os_name(t.os)][core::action_kind_name(s.options[0].kind)] += 1;
  }
  return stats_from_counts(int(tasks.size()), double(steps) / tasks.size(), per_os);
}

CorpusStats corpus_stats_trajectories(const std::vector<core::Trajectory>& trajs) {
  if (trajs.empty()) throw CuaError(Err::input_error, "empty corpus");
  std::map<std::string, std::map<std::string, int>> per_os;
  std::size_t steps = 0;
  for (const core::Trajectory& t : trajs) {
    steps += t.steps.size();
    for (const core::Step& s : t.steps)
      per_os[core::os_name(t.os)][core::action_kind_name(core::action_kind(s.action))] += 1;
  }
  return stats_from_counts(int(trajs.size()), double(steps) / trajs.size(), per_os);
}

bool report_is_consistent(const EvalReport& report) {
  int totals[3] = {0, 0, 0};
  int hits[3] = {0, 0, 0};
  for (const TaskResult& t : report.tasks) {
    bool all = true;
    for (const StepResult& s : t.steps) {
      int c = int(s.category);
      totals[c] += 1;
      if (s.success) hits[c] += 1;
      if (!s.success) all = false;
      if (s.success && !s.matched_option) return false;
      if (s.success && !s.predicted) return false;
    }
    if (t.task_success != all) return false;
  }
  auto rate = [](int h, int n) { return n > 0 ? 100.0 * h / n : 0.0; };
  auto close = [](double a, double b) { return std::abs(a - b) < 1e-9; };
  if (totals[0] != report.coord_total || hits[0] != report.coord_hits) return false;
  if (totals[1] != report.content_total || hits[1] != report.content_hits) return false;
  if (totals[2] != report.function_total || hits[2] != report.function_hits) return false;
  if (!close(report.coord_sr, rate(hits[0], totals[0]))) return false;
  if (!close(report.content_sr, rate(hits[1], totals[1]))) return false;
  if (!close(report.function_sr, rate(hits[2], totals[2]))) return false;
  int total = totals[0] + totals[1] + totals[2];
  int hit = hits[0] + hits[1] + hits[2];
  if (!close(report.avg_sr, rate(hit, total))) return false;
  if (report.avg_sr < 0 || report.avg_sr > 100) return false;
  return true;
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string report_to_markdown(const EvalReport& report) {
  std::ostringstream md;
  md << "# Offline step-matching report\n\n";
  md << "| Coord. SR | Content SR | Func. SR | Avg. SR |\n";
  md << "|----------:|-----------:|---------:|--------:|\n";
  md << "| " << fmt2(report.coord_sr) << " | " << fmt2(report.content_sr)
     << " | " << fmt2(report.function_sr) << " | " << fmt2(report.avg_sr)
     << " |\n\n";
  md << "## Action counts\n\n| action | count |\n|--------|------:|\n";
  for (const auto& [kind, count] : report.action_counts)
    md << "| " << kind << " | " << count << " |\n";
  md << "\n## Tasks\n\n| task | steps | matched | success |\n"
     << "|------|------:|--------:|---------|\n";
  for (const TaskResult& t : report.tasks) {
    int matched = 0;
    for (const StepResult& s : t.steps) matched += s.success ? 1 : 0;
    md << "| " << t.task_id << " | " << t.steps.size() << " | " << matched
       << " | " << (t.task_success ? "yes" : "no") << " |\n";
  }
  return md.str();
}

std::string report_to_json(const EvalReport& report) {
  ordered_json j;
  j["kind"] = "eval_report";
  j["coord_sr"] = report.coord_sr;
  j["content_sr"] = report.content_sr;
  j["function_sr"] = report.function_sr;
  j["avg_sr"] = report.avg_sr;
  j["coord_total"] = report.coord_total;
  j["content_total"] = report.content_total;
  j["function_total"] = report.function_total;
  j["coord_hits"] = report.coord_hits;
  j["content_hits"] = report.content_hits;
  j["function_hits"] = report.function_hits;
  j["action_counts"] = report.action_counts;
  j["tasks"] = ordered_json::array();
  for (const TaskResult& t : report.tasks) {
    ordered_json tj;
    tj["id"] = t.task_id;
    tj["success"] = t.task_success;
    tj["steps"] = ordered_json::array();
    for (const StepResult& s : t.steps) {
      ordered_json sj;
      sj["step"] = s.step_index;
      if (s.predicted)
        sj["predicted"] = dsl::render_action(*s.predicted);
      else
        sj["predicted"] = nullptr;
      if (s.matched_option) sj["matched_option"] = *s.matched_option;
      sj["success"] = s.success;
      sj["category"] = category_name(s.category);
      tj["steps"].push_back(std::move(sj));
    }
    j["tasks"].push_back(std::move(tj));
  }
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || j.value("kind", "") != "eval_report")
    throw CuaError(Err::input_error, "not an eval report");
  EvalReport report;
  report.coord_sr = j.at("coord_sr").get<double>();
  report.content_sr = j.at("content_sr").get<double>();
  report.function_sr = j.at("function_sr").get<double>();
  report.avg_sr = j.at("avg_sr").get<double>();
  report.coord_total = j.at("coord_total").get<int>();
  report.content_total = j.at("content_total").get<int>();
  report.function_total = j.at("function_total").get<int>();
  report.coord_hits = j.at("coord_hits").get<int>();
  report.content_hits = j.at("content_hits").get<int>();
  report.function_hits = j.at("function_hits").get<int>();
  report.action_counts = j.at("action_counts").get<std::map<std::string, int>>();
  for (const json& tj : j.at("tasks")) {
    TaskResult t;
    t.task_id = tj.at("id").get<std::string>();
    t.task_success = tj.at("success").get<bool>();
    for (const json& sj : tj.at("steps")) {
      StepResult s;
      s.step_index = sj.at("step").get<int>();
      if (!sj.at("predicted").is_null())
        s.predicted = dsl::parse_action(sj.at("predicted").get<std::string>());
      if (sj.contains("matched_option"))
        s.matched_option = sj.at("matched_option").get<int>();
      s.success = sj.at("success").get<bool>();
      std::string cat = sj.at("category").get<std::string>();
      s.category = cat == "coord" ? Category::coord
                   : cat == "content" ? Category::content : Category::function;
      t.steps.push_back(std::move(s));
    }
    report.tasks.push_back(std::move(t));
  }
  return report;
}

bool reports_equal(const EvalReport& a, const EvalReport& b) {
  return report_to_json(a) == report_to_json(b);
}

std::string run_matrix_to_markdown(const RunMatrix& matrix, int n) {
  std::ostringstream md;
  md << "# Run aggregation (step budget " << matrix.step_budget << ")\n\n";
  md << "| Run | SR |\n|-----|---:|\n";
  for (std::size_t r = 0; r < matrix.runs.size(); ++r) {
    int hits = 0;
    for (bool b : matrix.runs[r]) hits += b ? 1 : 0;
    md << "| Turn " << (r + 1) << " | "
       << fmt2(100.0 * hits / double(matrix.runs[r].size())) << " |\n";
  }
  md << "| Avg. | " << fmt2(run_average(matrix)) << " |\n";
  md << "| Pass@" << n << " | " << fmt2(pass_at_n(matrix, n)) << " |\n";
  return md.str();
}

std::string stats_to_markdown(const CorpusStats& stats) {
  std::ostringstream md;
  md << "# Corpus statistics\n\n";
  md << "Total tasks: " << stats.total_tasks << "\n\n";
  md << "Average steps per task: " << fmt2(stats.avg_steps) << "\n\n";
  md << "## Action distribution\n\n| action | count | % |\n|--------|------:|--:|\n";
  for (const auto& [kind, count] : stats.action_counts)
    md << "| " << kind << " | " << count << " | "
       << fmt2(stats.action_percentages.at(kind)) << " |\n";
  md << "\n## Per-OS distribution (%)\n\n| system |";
  for (const auto& [kind, count] : stats.action_counts) md << " " << kind << " |";
  md << "\n|--------|";
  for (std::size_t i = 0; i < stats.action_counts.size(); ++i) md << "--:|";
  md << "\n";
  for (const auto& [os, percentages] : stats.per_os_percentages) {
    md << "| " << os << " |";
    for (const auto& [kind, count] : stats.action_counts) {
      auto it = percentages.find(kind);
      md << " " << fmt2(it == percentages.end() ? 0.0 : it->second) << " |";
    }
    md << "\n";
  }
  return md.str();
}

std::string stats_to_json(const CorpusStats& stats) {
  ordered_json j;
  j["kind"] = "corpus_stats";
  j["total_tasks"] = stats.total_tasks;
  j["avg_steps"] = stats.avg_steps;
  j["action_counts"] = stats.action_counts;
  j["action_percentages"] = stats.action_percentages;
  j["per_os_counts"] = stats.per_os_counts;
  j["per_os_percentages"] = stats.per_os_percentages;
  return j.dump(2) + "\n";
}

// --- file formats ------------------------------------------------------------

namespace {

ordered_json bbox_to_json(const BBox& b) {
  return {{"x_min", b.x_min}, {"x_max", b.x_max},
          {"y_min", b.y_min}, {"y_max", b.y_max}};
}

BBox bbox_from_json(const json& j) {
  BBox b;
  b.x_min = j.at("x_min").get<double>();
  b.x_max = j.at("x_max").get<double>();
  b.y_min = j.at("y_min").get<double>();
  b.y_max = j.at("y_max").get<double>();
  if (b.x_min > b.x_max || b.y_min > b.y_max || b.x_min < 0 || b.x_max > 1 ||
      b.y_min < 0 || b.y_max > 1)
    throw CuaError(Err::format_error, "malformed bbox");
  return b;
}

ordered_json option_to_json(const GoldOption& o) {
  ordered_json j;
  switch (o.kind) {
    case ActionKind::click:
      j["kind"] = o.button == core::MouseButton::right ? "rightClick" : "click";
      if (o.button != core::MouseButton::right && o.button != core::MouseButton::left)
        j["button"] = core::button_name(o.button);
      j["bbox"] = bbox_to_json(*o.bbox);
      break;
    case ActionKind::middle_click:
    case ActionKind::move_to:
    case ActionKind::drag_to:
      j["kind"] = core::action_kind_name(o.kind);
      j["bbox"] = bbox_to_json(*o.bbox);
      break;
    case ActionKind::double_click:
    case ActionKind::triple_click:
      j["kind"] = core::action_kind_name(o.kind);
      if (o.button != core::MouseButton::left)
        j["button"] = core::button_name(o.button);
      j["bbox"] = bbox_to_json(*o.bbox);
      break;
    case ActionKind::write:
      j["kind"] = "write";
      j["text"] = o.target_text;
      j["max_edit_distance"] = o.max_edit_distance;
      if (!o.case_sensitive) j["case_sensitive"] = false;
      break;
    case ActionKind::press:
      j["kind"] = "press";
      j["keys"] = o.keys;
      break;
    case ActionKind::hotkey:
      j["kind"] = "hotkey";
      j["keys"] = o.keys;
      break;
    case ActionKind::scroll:
    case ActionKind::hscroll:
      j["kind"] = "scroll";
      j["direction"] = scroll_direction_name(o.direction);
      j["bbox"] = bbox_to_json(*o.bbox);
      break;
    case ActionKind::terminate:
      j["kind"] = "terminate";
      j["status"] = core::status_name(o.status);
      break;
    case ActionKind::wait:
      j["kind"] = "wait";
      break;
  }
  return j;
}

GoldOption option_from_json(const json& j) {
  GoldOption o;
  std::string kind = j.at("kind").get<std::string>();
  auto need_bbox = [&]() { o.bbox = bbox_from_json(j.at("bbox")); };
  if (kind == "click" || kind == "rightClick") {
    o.kind = ActionKind::click;
    o.button = kind == "rightClick" ? core::MouseButton::right
                                    : core::button_from_name(j.value("button", "left"));
    need_bbox();
  } else if (kind == "middleClick") {
    o.kind = ActionKind::middle_click;
    need_bbox();
  } else if (kind == "doubleClick" || kind == "tripleClick") {
    o.kind = kind == "doubleClick" ? ActionKind::double_click
                                   : ActionKind::triple_click;
    o.button = core::button_from_name(j.value("button", "left"));
    need_bbox();
  } else if (kind == "moveTo") {
    o.kind = ActionKind::move_to;
    need_bbox();
  } else if (kind == "dragTo") {
    o.kind = ActionKind::drag_to;
    need_bbox();
  } else if (kind == "write") {
    o.kind = ActionKind::write;
    o.target_text = j.at("text").get<std::string>();
    o.max_edit_distance = j.value("max_edit_distance", 0.1);
    o.case_sensitive = j.value("case_sensitive", true);
    if (o.max_edit_distance < 0 || o.max_edit_distance > 1)
      throw CuaError(Err::format_error, "edit distance bound outside [0,1]");
  } else if (kind == "press") {
    o.kind = ActionKind::press;
    o.keys = j.at("keys").get<std::vector<std::string>>();
  } else if (kind == "hotkey") {
    o.kind = ActionKind::hotkey;
    o.keys = j.at("keys").get<std::vector<std::string>>();
  } else if (kind == "scroll") {
    o.kind = ActionKind::scroll;
    o.direction = scroll_direction_from_name(j.at("direction").get<std::string>());
    need_bbox();
  } else if (kind == "terminate") {
    o.kind = ActionKind::terminate;
    o.status = core::status_from_name(j.value("status", "success"));
  } else if (kind == "wait") {
    o.kind = ActionKind::wait;
  } else {
    throw CuaError(Err::format_error, "unknown gold option kind: " + kind);
  }
  return o;
}

}  // namespace

std::vector<BenchTask> load_bench(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded())
    throw CuaError(Err::input_error, "bench file is not valid JSON");
  std::vector<BenchTask> tasks;
  for (const json& tj : j.at("tasks")) {
    BenchTask t;
    t.id = tj.at("id").get<std::string>();
    t.instruction = tj.at("instruction").get<std::string>();
    t.os = core::os_from_name(tj.at("os").get<std::string>());
    t.resolution.width = tj.at("resolution").at("width").get<int>();
    t.resolution.height = tj.at("resolution").at("height").get<int>();
    for (const json& sj : tj.at("steps")) {
      BenchStep s;
      s.screenshot = sj.value("screenshot", "");
      for (const json& oj : sj.at("options")) s.options.push_back(option_from_json(oj));
      if (s.options.empty())
        throw CuaError(Err::format_error, "step without gold options in " + t.id);
      t.steps.push_back(std::move(s));
    }
    if (t.steps.empty())
      throw CuaError(Err::format_error, "task without steps: " + t.id);
    bool has_terminate = false;
    for (const GoldOption& o : t.steps.back().options)
      if (o.kind == ActionKind::terminate) has_terminate = true;
    if (!has_terminate)
      throw CuaError(Err::format_error,
                     "final step of " + t.id + " lacks a terminate option");
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void save_bench(const std::vector<BenchTask>& tasks,
                const std::filesystem::path& path) {
  ordered_json j;
  j["tasks"] = ordered_json::array();
  for (const BenchTask& t : tasks) {
    ordered_json tj;
    tj["id"] = t.id;
    tj["instruction"] = t.instruction;
    tj["os"] = core::os_name(t.os);
    tj["resolution"] = {{"width", t.resolution.width}, {"height", t.resolution.height}};
    tj["steps"] = ordered_json::array();
    for (const BenchStep& s : t.steps) {
      ordered_json sj;
      sj["screenshot"] = s.screenshot;
      sj["options"] = ordered_json::array();
      for (const GoldOption& o : s.options) sj["options"].push_back(option_to_json(o));
      tj["steps"].push_back(std::move(sj));
    }
    j["tasks"].push_back(std::move(tj));
  }
  atomic_write(path, j.dump(2) + "\n");
}

std::map<std::string, std::vector<std::string>> load_predictions(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> preds;
  for (const std::string& line : split_lines(read_file(path))) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw CuaError(Err::input_error, "bad prediction line: " + line);
    std::string id = j.at("task_id").get<std::string>();
    std::size_t step = j.at("step").get<std::size_t>();
    auto& vec = preds[id];
    if (vec.size() <= step) vec.resize(step + 1);
    vec[step] = j.at("response").get<std::string>();
  }
  return preds;
}

void save_predictions(const std::map<std::string, std::vector<std::string>>& preds,
                      const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& [id, responses] : preds) {
    for (std::size_t i = 0; i < responses.size(); ++i) {
      ordered_json j;
      j["task_id"] = id;
      j["step"] = i;
      j["response"] = responses[i];
      out << j.dump() << "\n";
    }
  }
  atomic_write(path, out.str());
}

RunMatrix load_run_matrix(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded())
    throw CuaError(Err::input_error, "runs file is not valid JSON");
  RunMatrix m;
  m.step_budget = j.value("step_budget", "");
  for (const json& row : j.at("runs")) {
    std::vector<bool> r;
    for (const json& cell : row) {
      if (cell.is_boolean()) r.push_back(cell.get<bool>());
      else r.push_back(cell.get<int>() != 0);
    }
    m.runs.push_back(std::move(r));
  }
  check_matrix(m);
  return m;
}

void save_run_matrix(const RunMatrix& matrix, const std::filesystem::path& path) {
  ordered_json j;
  j["step_budget"] = matrix.step_budget;
  j["runs"] = ordered_json::array();
  for (const auto& row : matrix.runs) {
    ordered_json r = ordered_json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    j["runs"].push_back(std::move(r));
  }
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace cua::bench
