// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 7 and 8 drive the installed CLI binary (CUA_BIN).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cua/aligner.hpp"
#include "cua/bench.hpp"
#include "cua/cot.hpp"
#include "cua/dsl.hpp"
#include "cua/image.hpp"
#include "cua/model_client.hpp"
#include "cua/reducer.hpp"
#include "cua/sim.hpp"
#include "cua/synth.hpp"
#include "cua/trajectory.hpp"
#include "cua/util.hpp"
#include "helpers.hpp"

using namespace cua;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Failure(message);
}

// --- criterion 1 -------------------------------------------------------------

void criterion_parser_round_trip() {
  using core::AgentAction;
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240801);
  for (int i = 0; i < 10000; ++i) {
    AgentAction a = test::random_action(rng);
    AgentAction back = dsl::parse_action(dsl::render_action(a));
    if (!(back == a))
      throw Failure("round trip mismatch at sample " + std::to_string(i) +
                    ": " + dsl::render_action(a));
  }
  require(dsl::parse_action("pyautogui.click(x=0.157, y=0.1229)") ==
              AgentAction(core::Click{0.157, 0.1229, core::MouseButton::left}),
          "click literal parsed wrong");
  require(dsl::parse_action("computer.terminate(status='success')") ==
              AgentAction(core::Terminate{core::TaskStatus::success}),
          "terminate literal parsed wrong");
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  require(secs < 5.0, "round trip took " + std::to_string(secs) + "s (limit 5)");
}

// --- criterion 2 -------------------------------------------------------------

void criterion_reduction_equivalence() {
  auto start = std::chrono::steady_clock::now();
  const int trials = 1000;
  int exact = 0, state_equal = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(61000 + trial);
    auto script = synth::generate_script(rng);
    auto lowered = synth::lower_script(script, rng);
    auto recovered = reduce::actions_of(reduce::reduce_events(lowered.events, {}));
    if (recovered == script) ++exact;
    auto want = sim::replay(script, sim::initial_state());
    auto got = sim::replay(recovered, sim::initial_state());
    auto raw = sim::replay_events(lowered.events, sim::initial_state(), 0.005);
    if (want == got && want == raw) ++state_equal;
  }
  require(state_equal == trials,
          "state equivalence " + std::to_string(state_equal) + "/1000");
  require(exact * 1000 >= trials * 995,
          "exact recovery " + std::to_string(exact) + "/1000 (< 99.5%)");
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  require(secs < 60.0, "reduction suite took " + std::to_string(secs) + "s (limit 60)");
}

// --- criterion 3 -------------------------------------------------------------

// Independent frame reader and scanner for the keyframe rule; deliberately
// reimplemented from the documented policy rather than the aligner code.
struct RefImage {
  int w = 0, h = 0;
  std::vector<unsigned char> data;
};

RefImage ref_load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  in >> magic;
  RefImage im;
  int maxval;
  in >> im.w >> im.h >> maxval;
  in.get();
  im.data.resize(std::size_t(im.w) * im.h);
  in.read(reinterpret_cast<char*>(im.data.data()), std::streamsize(im.data.size()));
  return im;
}

double ref_diff(const RefImage& a, const RefImage& b) {
  double total = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    total += std::abs(double(a.data[i]) - double(b.data[i])) / 255.0;
  return total / double(a.data.size());
}

int reference_keyframe(const fs::path& dir, const std::vector<core::Frame>& frames,
                       const std::vector<core::RawEvent>& events,
                       reduce::Span span, std::int64_t idle_gap, double threshold) {
  std::size_t press_index = span.first;
  std::int64_t press_t = events[span.first].t;
  for (std::size_t i = span.first; i <= span.second && i < events.size(); ++i) {
    if (events[i].kind == core::EventKind::button_down) {
      press_index = i;
      press_t = events[i].t;
      break;
    }
  }
  std::int64_t t0 = press_t;
  std::int64_t last = press_t;
  for (std::size_t j = press_index; j-- > 0;) {
    if (events[j].kind != core::EventKind::move) break;
    if (last - events[j].t > idle_gap) break;
    t0 = events[j].t;
    last = events[j].t;
  }
  int latest = -1;
  for (std::size_t k = 0; k < frames.size(); ++k)
    if (frames[k].t <= t0) latest = int(k);
  if (latest < 0) return -1;
  for (int k = latest; k >= 1; --k) {
    RefImage prev = ref_load_pgm(dir / frames[std::size_t(k - 1)].file);
    RefImage cur = ref_load_pgm(dir / frames[std::size_t(k)].file);
    if (ref_diff(prev, cur) > threshold) return k;
  }
  return latest;
}

bool press_gesture_kind(const core::AgentAction& a) {
  switch (core::action_kind(a)) {
    case core::ActionKind::click:
    case core::ActionKind::middle_click:
    case core::ActionKind::double_click:
    case core::ActionKind::triple_click:
    case core::ActionKind::drag_to:
      return true;
    default:
      return false;
  }
}

void criterion_keyframe_antileakage() {
  test::TempDir tmp("accept_kf");
  synth::DemoOptions opts;
  opts.change_probability = 1.0;  // every gesture marks the screen
  align::AlignerConfig acfg;
  int checked = 0;
  for (int d = 0; d < 200; ++d) {
    auto demo = synth::make_demo(90000 + std::uint64_t(d) * 131, opts);
    fs::path dir = tmp.path() / ("demo_" + std::to_string(d));
    synth::write_demo(demo, dir);
    auto reduced = reduce::reduce(demo.demo, {});
    auto recovered = reduce::actions_of(reduced);
    require(recovered == demo.script,
            "demo " + std::to_string(d) + ": reduction not exact");
    auto traj = align::build_trajectory(demo.demo, reduced.actions, acfg, dir);
    require(traj.steps.size() == demo.truth.size() + 1,
            "demo " + std::to_string(d) + ": step count mismatch");
    for (std::size_t i = 0; i < demo.truth.size(); ++i) {
      if (!press_gesture_kind(traj.steps[i].action)) continue;
      const auto& step = traj.steps[i];
      std::int64_t t0 = demo.truth[i].premove_start;
      std::int64_t kf_t = demo.demo.frames[std::size_t(step.frame_index)].t;
      require(kf_t <= t0, "demo " + std::to_string(d) + " step " +
                              std::to_string(i) + ": keyframe leaks (" +
                              std::to_string(kf_t) + " > " + std::to_string(t0) + ")");
      int expected = reference_keyframe(dir, demo.demo.frames, demo.demo.events,
                                        step.span, acfg.idle_gap,
                                        acfg.diff_threshold);
      require(step.frame_index == expected,
              "demo " + std::to_string(d) + " step " + std::to_string(i) +
                  ": keyframe " + std::to_string(step.frame_index) +
                  " != reference " + std::to_string(expected));
      ++checked;
    }
  }
  require(checked >= 200, "too few click keyframes exercised: " +
                              std::to_string(checked));
}

// --- criterion 4 -------------------------------------------------------------

void criterion_metric_reproduction() {
  double avg = bench::run_average({28.29, 30.56, 30.28});
  require(std::abs(avg - 29.71) <= 0.005,
          "run average " + std::to_string(avg) + " != 29.71 +/- 0.005");

  std::mt19937_64 rng(4444);
  for (int trial = 0; trial < 1000; ++trial) {
    bench::RunMatrix m;
    int runs = int(test::rint(rng, 1, 8));
    int tasks = int(test::rint(rng, 1, 12));
    m.runs.assign(std::size_t(runs), {});
    for (auto& row : m.runs)
      for (int t = 0; t < tasks; ++t) row.push_back(test::rint(rng, 0, 2) == 0);
    double prev = -1;
    for (int n = 1; n <= runs; ++n) {
      int solved = 0;  // brute-force subset evaluator
      for (int t = 0; t < tasks; ++t) {
        bool any = false;
        for (int r = 0; r < n; ++r)
          any = any || m.runs[std::size_t(r)][std::size_t(t)];
        if (any) ++solved;
      }
      double expected = 100.0 * solved / tasks;
      double got = bench::pass_at_n(m, n);
      require(std::abs(got - expected) < 1e-9, "pass@n disagrees with oracle");
      require(got + 1e-9 >= prev, "pass@n not monotone");
      prev = got;
    }
  }
}

// --- criterion 5 -------------------------------------------------------------

void criterion_step_matching_fixture() {
  using core::ActionKind;
  using core::AgentAction;
  using core::MouseButton;
  using core::TaskStatus;
  using bench::BBox;
  using bench::GoldOption;
  using bench::ScrollDirection;

  require(bench::edit_distance("Helo", "Hello") == 1,
          "Levenshtein(Helo, Hello) != 1");

  auto click_gold = [](double x0, double x1, double y0, double y1,
                       MouseButton b = MouseButton::left) {
    GoldOption g;
    g.kind = ActionKind::click;
    g.button = b;
    g.bbox = BBox{x0, x1, y0, y1};
    return g;
  };
  auto coord_gold = [](ActionKind kind, BBox box,
                       MouseButton b = MouseButton::left) {
    GoldOption g;
    g.kind = kind;
    g.button = b;
    g.bbox = box;
    return g;
  };
  auto write_gold = [](const std::string& text, double bound, bool cs = true) {
    GoldOption g;
    g.kind = ActionKind::write;
    g.target_text = text;
    g.max_edit_distance = bound;
    g.case_sensitive = cs;
    return g;
  };
  auto keys_gold = [](ActionKind kind, std::vector<std::string> keys) {
    GoldOption g;
    g.kind = kind;
    g.keys = std::move(keys);
    return g;
  };
  auto scroll_gold = [](ScrollDirection dir, BBox box) {
    GoldOption g;
    g.kind = ActionKind::scroll;
    g.direction = dir;
    g.bbox = box;
    return g;
  };
  auto terminate_gold = [](TaskStatus status) {
    GoldOption g;
    g.kind = ActionKind::terminate;
    g.status = status;
    return g;
  };

  struct Case {
    const char* name;
    std::optional<AgentAction> predicted;
    std::vector<GoldOption> options;
    bool expected;
  };
  BBox mid{0.40, 0.60, 0.40, 0.60};
  std::vector<Case> cases = {
      // click bounding boxes, inclusive edges
      {"click center", core::Click{0.5, 0.5, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"click left edge", core::Click{0.4, 0.5, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"click right edge", core::Click{0.6, 0.5, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"click top edge", core::Click{0.5, 0.4, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"click bottom edge", core::Click{0.5, 0.6, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"click corner", core::Click{0.4, 0.4, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"click just outside x", core::Click{0.3999, 0.5, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
      {"click just outside y", core::Click{0.5, 0.6001, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
      {"click far outside", core::Click{0.9, 0.9, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
      // buttons and canonical right clicks
      {"right click matches rightClick gold", core::Click{0.5, 0.5, MouseButton::right}, {click_gold(0.4, 0.6, 0.4, 0.6, MouseButton::right)}, true},
      {"left click fails rightClick gold", core::Click{0.5, 0.5, MouseButton::left}, {click_gold(0.4, 0.6, 0.4, 0.6, MouseButton::right)}, false},
      {"right click fails left gold", core::Click{0.5, 0.5, MouseButton::right}, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
      // other coordinate kinds
      {"middle click", core::MiddleClick{0.5, 0.5}, {coord_gold(ActionKind::middle_click, mid)}, true},
      {"double click", core::DoubleClick{0.5, 0.5, MouseButton::left}, {coord_gold(ActionKind::double_click, mid)}, true},
      {"double click wrong button", core::DoubleClick{0.5, 0.5, MouseButton::right}, {coord_gold(ActionKind::double_click, mid)}, false},
      {"triple click", core::TripleClick{0.5, 0.5, MouseButton::left}, {coord_gold(ActionKind::triple_click, mid)}, true},
      {"moveTo", core::MoveTo{0.5, 0.5}, {coord_gold(ActionKind::move_to, mid)}, true},
      {"dragTo inside", core::DragTo{0.41, 0.59}, {coord_gold(ActionKind::drag_to, mid)}, true},
      {"dragTo outside", core::DragTo{0.2, 0.2}, {coord_gold(ActionKind::drag_to, mid)}, false},
      {"kind mismatch: click vs moveTo gold", core::Click{0.5, 0.5, MouseButton::left}, {coord_gold(ActionKind::move_to, mid)}, false},
      {"kind mismatch: write vs click gold", core::Write{"hi"}, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
      // write edit distance
      {"write exact", core::Write{"Hello"}, {write_gold("Hello", 0.0)}, true},
      {"write Helo at strict bound", core::Write{"Helo"}, {write_gold("Hello", 0.1)}, false},
      {"write Helo at loose bound", core::Write{"Helo"}, {write_gold("Hello", 0.2)}, true},
      {"write distance exactly at bound", core::Write{"ab"}, {write_gold("ac", 0.5)}, true},
      {"write distance just over bound", core::Write{"ab"}, {write_gold("ac", 0.49)}, false},
      {"write case sensitive by default", core::Write{"HELLO"}, {write_gold("hello", 0.1)}, false},
      {"write case override", core::Write{"HELLO"}, {write_gold("hello", 0.1, false)}, true},
      // press / hotkey exactness
      {"press enter", core::Press{"enter"}, {keys_gold(ActionKind::press, {"enter"})}, true},
      {"press synonym in gold", core::Press{"enter"}, {keys_gold(ActionKind::press, {"Return"})}, true},
      {"press wrong key", core::Press{"esc"}, {keys_gold(ActionKind::press, {"enter"})}, false},
      {"hotkey canonical order", core::Hotkey{{"ctrl", "shift", "t"}}, {keys_gold(ActionKind::hotkey, {"shift", "ctrl", "t"})}, true},
      {"hotkey permuted gold", core::Hotkey{{"ctrl", "shift", "t"}}, {keys_gold(ActionKind::hotkey, {"t", "shift", "ctrl"})}, true},
      {"hotkey missing key", core::Hotkey{{"ctrl", "t"}}, {keys_gold(ActionKind::hotkey, {"ctrl", "shift", "t"})}, false},
      {"hotkey extra key", core::Hotkey{{"ctrl", "alt", "t"}}, {keys_gold(ActionKind::hotkey, {"ctrl", "t"})}, false},
      {"press vs hotkey gold", core::Press{"t"}, {keys_gold(ActionKind::hotkey, {"ctrl", "t"})}, false},
      // scroll: direction x containment
      {"scroll down inside", core::Scroll{0, -5, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::down, mid)}, true},
      {"scroll up against down gold", core::Scroll{0, 5, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::down, mid)}, false},
      {"scroll up inside", core::Scroll{0, 3, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::up, mid)}, true},
      {"scroll down outside box", core::Scroll{0, -5, core::Point{0.1, 0.1}}, {scroll_gold(ScrollDirection::down, mid)}, false},
      {"scroll without position", core::Scroll{0, -5, std::nullopt}, {scroll_gold(ScrollDirection::down, mid)}, false},
      {"hscroll left inside", core::HScroll{-3, 0, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::left, mid)}, true},
      {"hscroll right inside", core::HScroll{4, 0, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::right, mid)}, true},
      {"hscroll wrong direction", core::HScroll{4, 0, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::left, mid)}, false},
      {"vertical scroll vs horizontal gold", core::Scroll{0, -3, core::Point{0.5, 0.5}}, {scroll_gold(ScrollDirection::left, mid)}, false},
      // terminate
      {"terminate status match", core::Terminate{TaskStatus::success}, {terminate_gold(TaskStatus::success)}, true},
      {"terminate status mismatch", core::Terminate{TaskStatus::failure}, {terminate_gold(TaskStatus::success)}, false},
      {"premature terminate at a click step", core::Terminate{TaskStatus::success}, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
      {"delayed: click at the terminate step", core::Click{0.5, 0.5, MouseButton::left}, {terminate_gold(TaskStatus::success)}, false},
      // option lists are disjunctive
      {"second option rescues", core::Click{0.5, 0.5, MouseButton::left}, {click_gold(0.0, 0.1, 0.0, 0.1), click_gold(0.4, 0.6, 0.4, 0.6)}, true},
      {"mixed-kind options", core::Write{"go"}, {click_gold(0.4, 0.6, 0.4, 0.6), write_gold("go", 0.0)}, true},
      // unparseable prediction
      {"no action fails", std::nullopt, {click_gold(0.4, 0.6, 0.4, 0.6)}, false},
  };

  require(cases.size() >= 40, "fixture suite has fewer than 40 cases");
  bench::MatchConfig cfg;
  for (const Case& c : cases) {
    auto result = bench::match_step(c.predicted, c.options, cfg);
    require(result.success == c.expected,
            std::string("case '") + c.name + "' expected " +
                (c.expected ? "success" : "failure"));
  }

  // The status switch inverts the one status-mismatch case.
  bench::MatchConfig lax;
  lax.check_terminate_status = false;
  require(bench::match_step(AgentAction(core::Terminate{TaskStatus::failure}),
                            {terminate_gold(TaskStatus::success)}, lax).success,
          "status switch off should accept either status");
}

// --- criterion 6 -------------------------------------------------------------

void criterion_sample_emission_laws() {
  test::TempDir tmp("accept_emit");
  fs::create_directories(tmp.path() / "frames");
  core::Trajectory traj;
  traj.instruction = "ten step fixture";
  traj.resolution = {1280, 720};
  const int steps = 10;
  for (int i = 0; i < steps; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frames/%06d.pgm", i);
    img::save_image(img::make_image(64, 36, 1, std::uint8_t(30 + 20 * i)),
                    tmp.path() / name);
    core::Step s;
    s.frame_index = i;
    s.frame_file = name;
    s.span = {std::size_t(i * 2), std::size_t(i * 2 + 1)};
    if (i + 1 == steps)
      s.action = core::Terminate{core::TaskStatus::success};
    else if (i % 2)
      s.action = core::Write{"text " + std::to_string(i)};
    else
      s.action = core::Click{0.1 + 0.08 * i, 0.5, core::MouseButton::left};
    traj.steps.push_back(std::move(s));
  }

  cot::MockModelClient mock;
  // Flag step 2 as incorrect; everything else annotates with defaults.
  mock.enqueue("reflector", "<verdict>correct</verdict><rationale>r</rationale><state_change>s1</state_change>");
  mock.enqueue("reflector", "<verdict>correct</verdict><rationale>r</rationale><state_change>s2</state_change>");
  mock.enqueue("reflector", "<verdict>incorrect</verdict><rationale>wrong control</rationale>");
  cot::CotConfig ccfg;
  ccfg.cue_dir = tmp.path() / "cues";
  for (std::size_t i = 0; i < traj.steps.size(); ++i)
    traj.steps[i].verdict = cot::reflect_step(mock, traj, i, tmp.path(), ccfg);
  for (std::size_t i = 0; i < traj.steps.size(); ++i)
    traj.steps[i].cot = cot::generate_cot(mock, traj, i, tmp.path(), ccfg);
  require(traj.steps[2].verdict->status == core::VerdictStatus::incorrect,
          "fixture flagging failed");

  for (cot::Level level : {cot::Level::L1, cot::Level::L2, cot::Level::L3}) {
    cot::SampleConfig scfg;
    scfg.level = level;
    scfg.history_images = 3;
    auto samples = cot::emit_training_samples(traj, scfg);
    require(samples.size() == steps - 1, "flagged step not excluded");

    int prev_step = -1;
    for (const auto& sample : samples) {
      require(sample.step != 2, "flagged step emitted");
      require(sample.step > prev_step, "emission order broken");
      prev_step = sample.step;

      int i = sample.step;
      int window = std::min(3, i + 1);
      // flagged step 2 occupies the image window for the step-3/4 samples
      int flagged_in_window = (2 < i && 2 >= i + 1 - window) ? 1 : 0;
      int images = 0;
      for (const auto& m : sample.messages)
        if (m.image) ++images;
      require(images <= window, "image-count law violated (too many)");
      require(images == window - flagged_in_window,
              "image count " + std::to_string(images) + " for step " +
                  std::to_string(i) + " (window " + std::to_string(window) +
                  ", flagged " + std::to_string(flagged_in_window) + ")");

      // Schema: system first, assistant target last, images are user
      // messages, history text lines are assistant messages.
      require(sample.messages.front().role == "system" &&
                  sample.messages.front().content.has_value(),
              "system message missing");
      const auto& target = sample.messages.back();
      require(target.role == "assistant" && target.content.has_value(),
              "target missing");
      for (std::size_t m = 1; m + 1 < sample.messages.size(); ++m) {
        const auto& msg = sample.messages[m];
        require(msg.role == "user" || msg.role == "assistant", "bad role");
        require(msg.content.has_value() != msg.image.has_value(),
                "message must carry exactly one of content/image");
        if (msg.image) require(msg.role == "user", "images must be user turns");
      }
      // Level ladder in the target.
      bool has_obs = target.content->find("## Observation:") != std::string::npos;
      bool has_thought = target.content->find("## Thought:") != std::string::npos;
      bool has_action = target.content->find("## Action:") != std::string::npos;
      bool has_code = target.content->find("## Code:") != std::string::npos;
      require(has_action && has_code, "target lacks Action/Code");
      require(has_obs == (level == cot::Level::L3), "Observation present at wrong level");
      require(has_thought == (level != cot::Level::L1), "Thought present at wrong level");
      // Step 3's history keeps the flagged step's action line.
      if (sample.step == 3) {
        bool line = false;
        for (const auto& m : sample.messages)
          if (m.content && m.content->find("# Step 3:") != std::string::npos &&
              m.role == "assistant")
            line = true;
        require(line, "flagged step's history line missing");
      }
    }
  }
}

// --- criteria 7 and 8: CLI-driven ---------------------------------------------

fs::path cua_binary() {
  const char* env = std::getenv("CUA_BIN");
  if (env && *env) return env;
  return fs::path("build") / "cua";
}

int run_cli_code(const std::string& args) {
  std::string cmd = cua_binary().string() + " " + args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cli(const std::string& args) { return run_cli_code(args); }

std::string file_hash(const fs::path& p) { return sha256_hex(read_file(p)); }

std::string tree_hash(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().string().find(ext) != std::string::npos &&
        e.path().string().find(".run.json") == std::string::npos)
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + ":" + file_hash(f) + "\n";
  return sha256_hex(all);
}

void criterion_pipeline_determinism() {
  test::TempDir tmp("accept_det");
  fs::path root = tmp.path();
  require(run_cli("synth-fixture --out " + (root / "corpus").string() +
                  " --count 6 --seed 99 --bench " + (root / "bench.json").string() +
                  " --preds " + (root / "preds.jsonl").string()) == 0,
          "synth-fixture failed");
  require(run_cli("reduce --in " + (root / "corpus").string() + " --out " +
                  (root / "reduced").string()) == 0, "reduce failed");
  require(run_cli("align --demo " + (root / "corpus").string() + " --traj " +
                  (root / "reduced").string() + " --out " +
                  (root / "aligned").string()) == 0, "align failed");

  auto annotate_emit_eval = [&](const std::string& tag, int workers) {
    fs::path out = root / ("annotated_" + tag);
    require(run_cli("annotate --traj " + (root / "aligned").string() +
                    " --demo " + (root / "corpus").string() + " --out " +
                    out.string() + " --backend mock --cache " +
                    (root / "cache").string() + " --workers " +
                    std::to_string(workers)) == 0,
            "annotate failed (" + tag + ")");
    require(run_cli("emit --traj " + out.string() + " --demo-root " +
                    (root / "corpus").string() + " --out " +
                    (root / ("samples_" + tag + ".jsonl")).string() +
                    " --level L2") == 0,
            "emit failed (" + tag + ")");
    require(run_cli("eval --bench " + (root / "bench.json").string() +
                    " --preds " + (root / "preds.jsonl").string() +
                    " --out-json " + (root / ("report_" + tag + ".json")).string() +
                    " --out-md " + (root / ("report_" + tag + ".md")).string()) == 0,
            "eval failed (" + tag + ")");
  };

  annotate_emit_eval("a", 1);
  annotate_emit_eval("b", 1);  // second run, same worker count
  annotate_emit_eval("c", 8);  // across worker counts

  std::string ta = tree_hash(root / "annotated_a", ".traj.json");
  std::string tb = tree_hash(root / "annotated_b", ".traj.json");
  std::string tc = tree_hash(root / "annotated_c", ".traj.json");
  require(ta == tb, "annotations differ across identical runs");
  require(ta == tc, "annotations differ across worker counts");
  require(file_hash(root / "samples_a.jsonl") == file_hash(root / "samples_b.jsonl"),
          "samples differ across runs");
  require(file_hash(root / "samples_a.jsonl") == file_hash(root / "samples_c.jsonl"),
          "samples differ across worker counts");
  require(file_hash(root / "report_a.json") == file_hash(root / "report_b.json"),
          "reports differ across runs");
  require(file_hash(root / "report_a.json") == file_hash(root / "report_c.json"),
          "reports differ across worker counts");
  require(file_hash(root / "report_a.md") == file_hash(root / "report_c.md"),
          "markdown reports differ");

  // synth-fixture is seed-reproducible
  require(run_cli("synth-fixture --out " + (root / "corpus2").string() +
                  " --count 6 --seed 99") == 0, "second synth failed");
  for (const auto& entry : fs::directory_iterator(root / "corpus")) {
    if (!entry.is_directory()) continue;
    fs::path other = root / "corpus2" / entry.path().filename();
    require(file_hash(entry.path() / "events.jsonl") ==
                file_hash(other / "events.jsonl"),
            "seeded corpora differ: " + entry.path().filename().string());
  }

  // reduce is idempotent given identical inputs
  require(run_cli("reduce --in " + (root / "corpus").string() + " --out " +
                  (root / "reduced2").string()) == 0, "second reduce failed");
  require(tree_hash(root / "reduced", ".traj.json") ==
              tree_hash(root / "reduced2", ".traj.json"),
          "reduce outputs differ across runs");

  // usage errors exit with 2 and leave no output behind
  require(run_cli_code("eval --bench " + (root / "bench.json").string() +
                       " --preds " + (root / "missing.jsonl").string() +
                       " --out-json " + (root / "nope.json").string()) == 2,
          "missing predictions should exit 2");
  require(!fs::exists(root / "nope.json"), "partial output left behind");
}

void criterion_end_to_end_smoke() {
  auto start = std::chrono::steady_clock::now();
  test::TempDir tmp("accept_e2e");
  fs::path root = tmp.path();
  require(run_cli("synth-fixture --out " + (root / "corpus").string() +
                  " --count 50 --seed 7 --bench " + (root / "bench.json").string() +
                  " --preds " + (root / "preds.jsonl").string()) == 0,
          "synth-fixture failed");
  require(run_cli("validate --in " + (root / "corpus").string()) == 0,
          "validate failed");
  require(run_cli("reduce --in " + (root / "corpus").string() + " --out " +
                  (root / "reduced").string() + " --workers 4") == 0,
          "reduce failed");
  require(run_cli("align --demo " + (root / "corpus").string() + " --traj " +
                  (root / "reduced").string() + " --out " +
                  (root / "aligned").string() + " --workers 4") == 0,
          "align failed");
  require(run_cli("annotate --traj " + (root / "aligned").string() + " --demo " +
                  (root / "corpus").string() + " --out " +
                  (root / "annotated").string() + " --backend mock --cache " +
                  (root / "cache").string() + " --workers 4") == 0,
          "annotate failed");
  require(run_cli("emit --traj " + (root / "annotated").string() +
                  " --demo-root " + (root / "corpus").string() + " --out " +
                  (root / "samples.jsonl").string() + " --level mixed") == 0,
          "emit failed");
  require(run_cli("eval --bench " + (root / "bench.json").string() + " --preds " +
                  (root / "preds.jsonl").string() + " --out-json " +
                  (root / "report.json").string() + " --out-md " +
                  (root / "report.md").string()) == 0,
          "eval failed");

  auto report = bench::report_from_json(read_file(root / "report.json"));
  require(bench::report_is_consistent(report), "report fails its consistency check");
  require(std::abs(report.avg_sr - 100.0) < 1e-9,
          "perfect predictions should score 100, got " + std::to_string(report.avg_sr));
  require(report.tasks.size() == 50, "expected 50 tasks in the report");

  std::ifstream samples(root / "samples.jsonl");
  int lines = 0;
  std::string line;
  while (std::getline(samples, line))
    if (!line.empty()) ++lines;
  require(lines > 100, "suspiciously few samples: " + std::to_string(lines));

  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
  require(secs < 300.0, "smoke run took " + std::to_string(secs) + "s (limit 300)");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void()> run;
  };
  std::vector<Criterion> criteria = {
      {"1 parser round trip (10k actions + documented literals, <5s)",
       criterion_parser_round_trip},
      {"2 reduction replay equivalence (1000 scripts, >=99.5% exact, 100% state, <60s)",
       criterion_reduction_equivalence},
      {"3 keyframe anti-leakage (200 demos, reference scanner agreement)",
       criterion_keyframe_antileakage},
      {"4 metric reproduction (run average 29.71, pass@n monotone vs oracle)",
       criterion_metric_reproduction},
      {"5 step matching fixture suite (>=40 hand-computed cases)",
       criterion_step_matching_fixture},
      {"6 sample emission laws (image counts, level ladder, flagged steps)",
       criterion_sample_emission_laws},
      {"7 pipeline determinism (cache replay, workers 1 vs 8)",
       criterion_pipeline_determinism},
      {"8 end-to-end smoke (50 demos through the full pipeline, <5min)",
       criterion_end_to_end_smoke},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start).count();
    if (error.empty()) {
      std::printf("[PASS] criterion %s (%.2fs)\n", criterion.name, secs);
    } else {
      std::printf("[FAIL] criterion %s (%.2fs): %s\n", criterion.name, secs,
                  error.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
