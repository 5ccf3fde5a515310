#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cua/aligner.hpp"
#include "cua/bench.hpp"
#include "cua/cot.hpp"
#include "cua/demo_io.hpp"
#include "cua/dsl.hpp"
#include "cua/model_client.hpp"
#include "cua/reducer.hpp"
#include "cua/synth.hpp"
#include "cua/trajectory.hpp"
#include "cua/util.hpp"
#include "cua/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

void log_line(const char* level, const std::string& cmd, const std::string& msg) {
  std::fprintf(stderr, "level=%s cmd=%s msg=\"%s\"\n", level, cmd.c_str(),
               msg.c_str());
}

// Work pool over independent items; the first failure wins and is rethrown.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string hash_input(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::vector<std::string> names;
    for (const auto& entry : fs::recursive_directory_iterator(path))
      if (entry.is_regular_file())
        names.push_back(entry.path().lexically_relative(path).string() + ":" +
                        std::to_string(entry.file_size()));
    std::sort(names.begin(), names.end());
    std::string all;
    for (const auto& n : names) all += n + "\n";
    return cua::sha256_hex(all);
  }
  return cua::sha256_hex(cua::read_file(path));
}

// Provenance record next to every output; semantic config only, so byte
// output is identical regardless of worker count.
void write_run_manifest(const fs::path& out, const std::string& command,
                        const std::map<std::string, std::string>& config,
                        const std::vector<fs::path>& inputs) {
  ordered_json j;
  j["tool"] = "cua";
  j["version"] = kVersion;
  j["command"] = command;
  std::string config_blob;
  for (const auto& [k, v] : config) config_blob += k + "=" + v + "\n";
  j["config"] = config;
  j["config_hash"] = cua::sha256_hex(config_blob);
  ordered_json in;
  for (const fs::path& p : inputs) in[p.string()] = hash_input(p);
  j["inputs"] = std::move(in);
  fs::path manifest = out;
  manifest += ".run.json";
  cua::atomic_write(manifest, j.dump(2) + "\n");
}

std::vector<fs::path> demo_dirs_of(const fs::path& in) {
  if (cua::core::is_demonstration_dir(in)) return {in};
  auto dirs = cua::core::list_corpus(in);
  if (dirs.empty())
    throw cua::CuaError(cua::Err::input_error,
                        "no demonstrations under " + in.string());
  return dirs;
}

std::vector<fs::path> traj_files_of(const fs::path& in) {
  if (fs::is_regular_file(in)) return {in};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(in))
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().string().find(".run.json") == std::string::npos)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw cua::CuaError(cua::Err::input_error,
                        "no trajectory files under " + in.string());
  return files;
}

std::string traj_name_for(const fs::path& demo_dir) {
  return demo_dir.filename().string() + ".traj.json";
}

void require_exists(const fs::path& p, const std::string& what) {
  if (!fs::exists(p))
    throw cua::CuaError(cua::Err::input_error, what + " not found: " + p.string());
}

void require_distinct(const fs::path& in, const fs::path& out) {
  if (fs::weakly_canonical(in) == fs::weakly_canonical(out))
    throw cua::CuaError(cua::Err::input_error,
                        "input and output paths must differ: " + in.string());
}

int run_validate(const fs::path& in, bool as_json) {
  int exit_code = 0;
  for (const fs::path& dir : demo_dirs_of(in)) {
    std::vector<cua::core::Finding> findings;
    try {
      auto demo = cua::core::load_demonstration(dir);
      findings = cua::core::validate_demonstration(demo);
    } catch (const cua::CuaError& e) {
      findings.push_back({cua::core::Severity::error, "unreadable", e.what(),
                          dir.string()});
    }
    for (const auto& f : findings) {
      if (as_json) {
        ordered_json j;
        j["demo"] = dir.filename().string();
        j["severity"] = f.severity == cua::core::Severity::error ? "error" : "warn";
        j["code"] = f.code;
        j["message"] = f.message;
        j["location"] = f.location;
        std::cout << j.dump() << "\n";
      } else {
        std::cout << dir.filename().string() << " "
                  << (f.severity == cua::core::Severity::error ? "error" : "warn")
                  << " " << f.code << " " << f.location << ": " << f.message
                  << "\n";
      }
      if (f.severity == cua::core::Severity::error) exit_code = 1;
    }
  }
  return exit_code;
}

cua::core::Trajectory partial_trajectory(const cua::core::RawDemonstration& demo,
                                         const cua::reduce::ReduceResult& reduced) {
  cua::core::Trajectory traj;
  traj.instruction = demo.instruction;
  traj.os = demo.os;
  traj.resolution = demo.resolution;
  traj.status = demo.status;
  for (const auto& ra : reduced.actions) {
    cua::core::Step step;
    step.action = ra.action;
    step.span = ra.span;
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory processing and offline evaluation for computer-use agents"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML-style config file; flags override it");
  app.require_subcommand(1);

  // ---- validate ----
  auto* validate = app.add_subcommand("validate", "Check a demonstration directory");
  fs::path v_in;
  bool v_json = false;
  validate->add_option("--in", v_in, "demonstration or corpus directory")->required();
  validate->add_flag("--json", v_json, "emit findings as JSONL");

  // ---- reduce ----
  auto* reduce_cmd = app.add_subcommand("reduce", "Compress raw events into actions");
  fs::path r_in, r_out;
  int r_workers = 1;
  cua::reduce::ReducerConfig r_cfg;
  reduce_cmd->add_option("--in", r_in, "demonstration or corpus directory")->required();
  reduce_cmd->add_option("--out", r_out, "trajectory file or output directory")->required();
  reduce_cmd->add_option("--workers", r_workers, "parallel demonstrations");
  reduce_cmd->add_option("--double-click-window", r_cfg.double_click_window);
  reduce_cmd->add_option("--multi-click-radius", r_cfg.multi_click_radius);
  reduce_cmd->add_option("--drag-min-distance", r_cfg.drag_min_distance);
  reduce_cmd->add_option("--scroll-merge-gap", r_cfg.scroll_merge_gap);
  reduce_cmd->add_option("--typing-merge-gap", r_cfg.typing_merge_gap);

  // ---- align ----
  auto* align_cmd = app.add_subcommand("align", "Attach keyframes and the terminal step");
  fs::path a_demo, a_traj, a_out;
  int a_workers = 1;
  cua::align::AlignerConfig a_cfg;
  align_cmd->add_option("--demo", a_demo, "demonstration or corpus directory")->required();
  align_cmd->add_option("--traj", a_traj, "reduced trajectory file or directory")->required();
  align_cmd->add_option("--out", a_out, "aligned trajectory file or directory")->required();
  align_cmd->add_option("--workers", a_workers, "parallel demonstrations");
  align_cmd->add_option("--idle-gap", a_cfg.idle_gap);
  align_cmd->add_option("--diff-threshold", a_cfg.diff_threshold);

  // ---- annotate ----
  auto* annotate_cmd = app.add_subcommand("annotate", "Synthesize reflections and CoT");
  fs::path an_traj, an_demo, an_out, an_cache, an_backend_cfg, an_cues;
  std::string an_backend = "mock";
  int an_workers = 1, an_retries = 3;
  annotate_cmd->add_option("--traj", an_traj, "aligned trajectory file or directory")->required();
  annotate_cmd->add_option("--demo", an_demo, "demonstration or corpus directory")->required();
  annotate_cmd->add_option("--out", an_out, "annotated trajectory file or directory")->required();
  annotate_cmd->add_option("--backend", an_backend, "mock | replay | http")
      ->check(CLI::IsMember({"mock", "replay", "http"}));
  annotate_cmd->add_option("--cache", an_cache, "response cache directory")->required();
  annotate_cmd->add_option("--backend-config", an_backend_cfg, "backend JSON config");
  annotate_cmd->add_option("--cues", an_cues, "visual cue output directory");
  annotate_cmd->add_option("--workers", an_workers, "parallel trajectories");
  annotate_cmd->add_option("--retries", an_retries, "attempts per request");

  // ---- emit ----
  auto* emit_cmd = app.add_subcommand("emit", "Emit chat training samples");
  fs::path e_traj, e_out, e_demo_root;
  std::string e_level = "L2", e_mix = "1,1,1";
  int e_window = 3;
  bool e_keep_flagged = false, e_include_high = false, e_no_refined = false;
  emit_cmd->add_option("--traj", e_traj, "annotated trajectory file or directory")->required();
  emit_cmd->add_option("--out", e_out, "samples.jsonl path")->required();
  emit_cmd->add_option("--demo-root", e_demo_root, "prefix for image references");
  emit_cmd->add_option("--level", e_level, "L1 | L2 | L3 | mixed");
  emit_cmd->add_option("--mix", e_mix, "integer weights for mixed, e.g. 1,1,1");
  emit_cmd->add_option("--window", e_window, "history screenshots");
  emit_cmd->add_flag("--keep-flagged", e_keep_flagged, "emit flagged steps too");
  emit_cmd->add_flag("--include-high-privacy", e_include_high);
  emit_cmd->add_flag("--no-refined", e_no_refined, "keep the raw instruction");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against a benchmark");
  fs::path ev_bench, ev_preds, ev_out_md, ev_out_json;
  bool ev_no_status = false;
  eval_cmd->add_option("--bench", ev_bench, "bench.json")->required();
  eval_cmd->add_option("--preds", ev_preds, "preds.jsonl")->required();
  eval_cmd->add_option("--out-md", ev_out_md, "markdown report path");
  eval_cmd->add_option("--out-json", ev_out_json, "JSON report path");
  eval_cmd->add_flag("--no-status-check", ev_no_status,
                     "accept terminate regardless of status");

  // ---- passn ----
  auto* passn_cmd = app.add_subcommand("passn", "Pass@n and run averaging");
  fs::path p_runs, p_out_md;
  std::vector<fs::path> p_reports;
  int p_n = 0;
  std::string p_mode = "passn";
  passn_cmd->add_option("--runs", p_runs, "runs.json matrix");
  passn_cmd->add_option("--reports", p_reports, "eval report JSON files (one per run)");
  passn_cmd->add_option("--n", p_n, "number of runs to consider");
  passn_cmd->add_option("--mode", p_mode, "passn | avg")
      ->check(CLI::IsMember({"passn", "avg"}));
  passn_cmd->add_option("--out-md", p_out_md, "markdown table path");

  // ---- stats ----
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  fs::path s_bench, s_traj, s_out_md, s_out_json;
  stats_cmd->add_option("--bench", s_bench, "bench.json");
  stats_cmd->add_option("--traj", s_traj, "trajectory file or directory");
  stats_cmd->add_option("--out-md", s_out_md);
  stats_cmd->add_option("--out-json", s_out_json);

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "Re-render a stored report");
  fs::path rp_in, rp_out;
  std::string rp_format = "md";
  report_cmd->add_option("--in", rp_in, "report.json")->required();
  report_cmd->add_option("--format", rp_format, "md | json")
      ->check(CLI::IsMember({"md", "json"}));
  report_cmd->add_option("--out", rp_out, "output path (stdout when absent)");

  // ---- synth-fixture ----
  auto* synth_cmd = app.add_subcommand("synth-fixture", "Generate a synthetic corpus");
  fs::path sy_out, sy_bench, sy_preds;
  int sy_count = 10;
  std::uint64_t sy_seed = 1;
  int sy_min = 4, sy_max = 12;
  double sy_change = 0.85;
  synth_cmd->add_option("--out", sy_out, "corpus output directory")->required();
  synth_cmd->add_option("--count", sy_count, "number of demonstrations");
  synth_cmd->add_option("--seed", sy_seed, "generator seed");
  synth_cmd->add_option("--min-steps", sy_min);
  synth_cmd->add_option("--max-steps", sy_max);
  synth_cmd->add_option("--change-prob", sy_change, "screen change probability");
  synth_cmd->add_option("--bench", sy_bench, "also derive bench.json here");
  synth_cmd->add_option("--preds", sy_preds, "also derive perfect preds.jsonl here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      require_exists(v_in, "input");
      return run_validate(v_in, v_json);
    }

    if (*reduce_cmd) {
      require_exists(r_in, "input");
      require_distinct(r_in, r_out);
      auto dirs = demo_dirs_of(r_in);
      bool corpus = dirs.size() > 1 || !cua::core::is_demonstration_dir(r_in);
      std::atomic<int> failed{0};
      parallel_for(dirs.size(), r_workers, [&](std::size_t i) {
        auto demo = cua::core::load_demonstration(dirs[i]);
        auto findings = cua::core::validate_demonstration(demo);
        if (cua::core::has_errors(findings)) {
          log_line("error", "reduce", dirs[i].string() + " failed validation");
          failed.fetch_add(1);
          return;
        }
        auto reduced = cua::reduce::reduce(demo, r_cfg);
        for (const auto& w : reduced.warnings)
          log_line("warn", "reduce", dirs[i].filename().string() + ": " + w);
        auto traj = partial_trajectory(demo, reduced);
        fs::path out = corpus ? r_out / traj_name_for(dirs[i]) : r_out;
        cua::core::save_trajectory(traj, out);
      });
      if (failed.load() > 0) return 1;
      write_run_manifest(r_out, "reduce",
                         {{"double_click_window", std::to_string(r_cfg.double_click_window)},
                          {"multi_click_radius", std::to_string(r_cfg.multi_click_radius)},
                          {"drag_min_distance", std::to_string(r_cfg.drag_min_distance)},
                          {"scroll_merge_gap", std::to_string(r_cfg.scroll_merge_gap)},
                          {"typing_merge_gap", std::to_string(r_cfg.typing_merge_gap)}},
                         {r_in});
      log_line("info", "reduce", "reduced " + std::to_string(dirs.size()) + " demonstration(s)");
      return 0;
    }

    if (*align_cmd) {
      require_exists(a_demo, "demo input");
      require_exists(a_traj, "trajectory input");
      require_distinct(a_traj, a_out);
      auto dirs = demo_dirs_of(a_demo);
      bool corpus = !cua::core::is_demonstration_dir(a_demo);
      parallel_for(dirs.size(), a_workers, [&](std::size_t i) {
        fs::path traj_path = corpus ? a_traj / traj_name_for(dirs[i]) : a_traj;
        auto partial = cua::core::load_trajectory(traj_path);
        auto demo = cua::core::load_demonstration(dirs[i]);
        std::vector<cua::reduce::ReducedAction> reduced;
        for (const auto& step : partial.steps)
          reduced.push_back({step.action, step.span});
        auto traj = cua::align::build_trajectory(demo, reduced, a_cfg, dirs[i]);
        auto problems = cua::core::check_trajectory(traj);
        if (!problems.empty())
          throw cua::CuaError(cua::Err::alignment_error,
                              dirs[i].string() + ": " + problems.front());
        fs::path out = corpus ? a_out / traj_name_for(dirs[i]) : a_out;
        cua::core::save_trajectory(traj, out);
      });
      write_run_manifest(a_out, "align",
                         {{"idle_gap", std::to_string(a_cfg.idle_gap)},
                          {"diff_threshold", std::to_string(a_cfg.diff_threshold)}},
                         {a_demo, a_traj});
      log_line("info", "align", "aligned " + std::to_string(dirs.size()) + " trajectory(ies)");
      return 0;
    }

    if (*annotate_cmd) {
      require_exists(an_traj, "trajectory input");
      require_exists(an_demo, "demo input");
      require_distinct(an_traj, an_out);
      auto dirs = demo_dirs_of(an_demo);
      bool corpus = !cua::core::is_demonstration_dir(an_demo);

      std::shared_ptr<cua::cot::ModelClient> base;
      if (an_backend == "mock") {
        base = std::make_shared<cua::cot::MockModelClient>();
      } else if (an_backend == "http") {
        require_exists(an_backend_cfg, "backend config");
        base = std::make_shared<cua::cot::HttpModelClient>(
            cua::cot::load_backend_config(an_backend_cfg));
      }  // replay: no inner backend, cache only
      cua::cot::CachedModelClient client(base, an_cache);

      parallel_for(dirs.size(), an_workers, [&](std::size_t i) {
        fs::path traj_path = corpus ? an_traj / traj_name_for(dirs[i]) : an_traj;
        auto traj = cua::core::load_trajectory(traj_path);
        cua::cot::CotConfig cfg;
        cfg.retry_limit = an_retries;
        cfg.backoff_ms = an_backend == "http" ? 250 : 0;
        cfg.cue_dir = an_cues.empty() ? fs::path(an_cache) / "cues" /
                                            dirs[i].filename()
                                      : an_cues / dirs[i].filename();
        std::vector<std::string> failures;
        auto annotated =
            cua::cot::annotate_trajectory(client, std::move(traj), dirs[i], cfg, &failures);
        for (const auto& f : failures)
          log_line("warn", "annotate", dirs[i].filename().string() + ": " + f);
        fs::path out = corpus ? an_out / traj_name_for(dirs[i]) : an_out;
        cua::core::save_trajectory(annotated, out);
      });
      write_run_manifest(an_out, "annotate",
                         {{"backend", an_backend},
                          {"retries", std::to_string(an_retries)}},
                         {an_traj});
      log_line("info", "annotate",
               "annotated " + std::to_string(dirs.size()) + " trajectory(ies), cache hits " +
                   std::to_string(client.hits()) + " misses " +
                   std::to_string(client.misses()));
      return 0;
    }

    if (*emit_cmd) {
      require_exists(e_traj, "trajectory input");
      require_distinct(e_traj, e_out);
      auto files = traj_files_of(e_traj);
      std::vector<cua::cot::Level> pattern;
      if (e_level == "mixed") {
        std::istringstream mix(e_mix);
        std::string tok;
        int which = 0;
        while (std::getline(mix, tok, ',')) {
          int weight = std::stoi(tok);
          for (int k = 0; k < weight; ++k)
            pattern.push_back(cua::cot::Level(which));
          which = std::min(which + 1, 2);
        }
        if (pattern.empty())
          throw cua::CuaError(cua::Err::input_error, "empty level mix");
      } else {
        pattern.push_back(cua::cot::level_from_name(e_level));
      }

      std::ostringstream out;
      std::size_t counter = 0;
      for (const fs::path& file : files) {
        auto traj = cua::core::load_trajectory(file);
        if (!e_demo_root.empty()) {
          std::string demo_name = file.filename().string();
          auto dot = demo_name.find(".traj.json");
          if (dot != std::string::npos) demo_name = demo_name.substr(0, dot);
          for (auto& step : traj.steps)
            step.frame_file = (e_demo_root / demo_name / step.frame_file).string();
        }
        cua::cot::SampleConfig cfg;
        cfg.history_images = e_window;
        cfg.drop_flagged_steps = !e_keep_flagged;
        cfg.skip_high_privacy = !e_include_high;
        cfg.use_refined_instruction = !e_no_refined;

        if (pattern.size() == 1) {
          cfg.level = pattern[0];
          for (const auto& sample : cua::cot::emit_training_samples(traj, cfg))
            out << cua::cot::sample_to_json(sample) << "\n";
        } else {
          // Mixed levels cycle deterministically across the corpus.
          std::map<cua::cot::Level, std::vector<cua::cot::ChatSample>> per_level;
          for (auto level : {cua::cot::Level::L1, cua::cot::Level::L2, cua::cot::Level::L3}) {
            cfg.level = level;
            per_level[level] = cua::cot::emit_training_samples(traj, cfg);
          }
          std::size_t n = per_level[cua::cot::Level::L1].size();
          for (std::size_t s = 0; s < n; ++s) {
            auto level = pattern[counter++ % pattern.size()];
            out << cua::cot::sample_to_json(per_level[level][s]) << "\n";
          }
        }
      }
      cua::atomic_write(e_out, out.str());
      write_run_manifest(e_out, "emit",
                         {{"level", e_level},
                          {"mix", e_mix},
                          {"window", std::to_string(e_window)},
                          {"keep_flagged", e_keep_flagged ? "1" : "0"}},
                         {e_traj});
      log_line("info", "emit", "wrote samples to " + e_out.string());
      return 0;
    }

    if (*eval_cmd) {
      require_exists(ev_bench, "bench file");
      require_exists(ev_preds, "predictions file");
      auto tasks = cua::bench::load_bench(ev_bench);
      auto preds = cua::bench::load_predictions(ev_preds);
      cua::bench::MatchConfig cfg;
      cfg.check_terminate_status = !ev_no_status;
      auto report = cua::bench::evaluate_benchmark(tasks, preds, cfg);
      if (!cua::bench::report_is_consistent(report))
        throw cua::CuaError(cua::Err::input_error,
                            "internal consistency check failed");
      if (!ev_out_md.empty())
        cua::atomic_write(ev_out_md, cua::bench::report_to_markdown(report));
      if (!ev_out_json.empty())
        cua::atomic_write(ev_out_json, cua::bench::report_to_json(report));
      if (ev_out_md.empty() && ev_out_json.empty())
        std::cout << cua::bench::report_to_markdown(report);
      fs::path manifest_anchor = !ev_out_json.empty() ? ev_out_json
                                 : !ev_out_md.empty() ? ev_out_md
                                                      : ev_bench;
      write_run_manifest(manifest_anchor, "eval",
                         {{"check_terminate_status", cfg.check_terminate_status ? "1" : "0"}},
                         {ev_bench, ev_preds});
      char line[128];
      std::snprintf(line, sizeof line,
                    "avg_sr=%.2f coord=%.2f content=%.2f function=%.2f",
                    report.avg_sr, report.coord_sr, report.content_sr,
                    report.function_sr);
      log_line("info", "eval", line);
      return 0;
    }

    if (*passn_cmd) {
      cua::bench::RunMatrix matrix;
      if (!p_runs.empty()) {
        require_exists(p_runs, "runs file");
        matrix = cua::bench::load_run_matrix(p_runs);
      } else if (!p_reports.empty()) {
        for (const fs::path& rp : p_reports) {
          require_exists(rp, "report");
          auto report = cua::bench::report_from_json(cua::read_file(rp));
          std::vector<bool> row;
          for (const auto& task : report.tasks) row.push_back(task.task_success);
          matrix.runs.push_back(std::move(row));
        }
      } else {
        throw cua::CuaError(cua::Err::input_error, "need --runs or --reports");
      }
      int n = p_n > 0 ? p_n : int(matrix.runs.size());
      double value = p_mode == "avg" ? cua::bench::run_average(matrix)
                                     : cua::bench::pass_at_n(matrix, n);
      std::printf("%.2f\n", value);
      if (!p_out_md.empty())
        cua::atomic_write(p_out_md, cua::bench::run_matrix_to_markdown(matrix, n));
      return 0;
    }

    if (*stats_cmd) {
      cua::bench::CorpusStats stats;
      fs::path input;
      if (!s_bench.empty()) {
        require_exists(s_bench, "bench file");
        stats = cua::bench::corpus_stats_tasks(cua::bench::load_bench(s_bench));
        input = s_bench;
      } else if (!s_traj.empty()) {
        require_exists(s_traj, "trajectory input");
        std::vector<cua::core::Trajectory> trajs;
        for (const fs::path& f : traj_files_of(s_traj))
          trajs.push_back(cua::core::load_trajectory(f));
        stats = cua::bench::corpus_stats_trajectories(trajs);
        input = s_traj;
      } else {
        throw cua::CuaError(cua::Err::input_error, "need --bench or --traj");
      }
      if (!s_out_md.empty())
        cua::atomic_write(s_out_md, cua::bench::stats_to_markdown(stats));
      if (!s_out_json.empty())
        cua::atomic_write(s_out_json, cua::bench::stats_to_json(stats));
      if (s_out_md.empty() && s_out_json.empty())
        std::cout << cua::bench::stats_to_markdown(stats);
      return 0;
    }

    if (*report_cmd) {
      require_exists(rp_in, "report");
      auto report = cua::bench::report_from_json(cua::read_file(rp_in));
      std::string rendered = rp_format == "json"
                                 ? cua::bench::report_to_json(report)
                                 : cua::bench::report_to_markdown(report);
      if (rp_out.empty())
        std::cout << rendered;
      else
        cua::atomic_write(rp_out, rendered);
      return 0;
    }

    if (*synth_cmd) {
      cua::synth::DemoOptions opts;
      opts.script.min_actions = sy_min;
      opts.script.max_actions = sy_max;
      opts.change_probability = sy_change;
      auto demos = cua::synth::write_corpus(sy_out, sy_count, sy_seed, opts);
      if (!sy_bench.empty() || !sy_preds.empty()) {
        std::vector<cua::bench::BenchTask> tasks;
        std::map<std::string, std::vector<std::string>> preds;
        for (std::size_t i = 0; i < demos.size(); ++i) {
          char id[32];
          std::snprintf(id, sizeof id, "demo_%04d", int(i));
          tasks.push_back(cua::synth::bench_task_from(demos[i], id));
          preds[id] = cua::synth::perfect_responses(demos[i]);
        }
        if (!sy_bench.empty()) cua::bench::save_bench(tasks, sy_bench);
        if (!sy_preds.empty()) cua::bench::save_predictions(preds, sy_preds);
      }
      write_run_manifest(sy_out, "synth-fixture",
                         {{"count", std::to_string(sy_count)},
                          {"seed", std::to_string(sy_seed)},
                          {"min_steps", std::to_string(sy_min)},
                          {"max_steps", std::to_string(sy_max)},
                          {"change_prob", std::to_string(sy_change)}},
                         {});
      log_line("info", "synth-fixture",
               "wrote " + std::to_string(sy_count) + " demonstrations to " +
                   sy_out.string());
      return 0;
    }
  } catch (const cua::CuaError& e) {
    log_line("error", app.get_subcommands().empty()
                          ? "cua"
                          : app.get_subcommands()[0]->get_name(),
             std::string(cua::err_name(e.code())) + ": " + e.what());
    return e.code() == cua::Err::input_error || e.code() == cua::Err::io_error ? 2 : 1;
  } catch (const std::exception& e) {
    log_line("error", "cua", e.what());
    return 1;
  }
  return 0;
}
