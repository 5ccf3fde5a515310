#include <doctest.h>

#include <cmath>

#include "cua/aligner.hpp"
#include "cua/image.hpp"
#include "cua/reducer.hpp"
#include "cua/synth.hpp"
#include "helpers.hpp"

using namespace cua;
using namespace cua::core;
using namespace cua::align;

namespace {

Frame write_gray_frame(const test::TempDir& tmp, int index, std::int64_t t,
                       int w, int h, std::uint8_t value) {
  char name[32];
  std::snprintf(name, sizeof name, "frames/%06d.pgm", index);
  img::Image im = img::make_image(w, h, 1, value);
  img::save_image(im, tmp.path() / name);
  return Frame{index, t, name, w, h};
}

RawEvent mouse(std::int64_t t, EventKind kind, double x, double y,
               std::optional<MouseButton> b = std::nullopt) {
  RawEvent e;
  e.t = t;
  e.device = Device::mouse;
  e.kind = kind;
  e.pos = Point{x, y};
  e.button = b;
  return e;
}

RawEvent key(std::int64_t t, EventKind kind, const std::string& name) {
  RawEvent e;
  e.t = t;
  e.device = Device::keyboard;
  e.kind = kind;
  e.key = name;
  return e;
}

// Full-resolution per-pixel reference for the frame metric.
double full_res_mad(const img::Image& a, const img::Image& b) {
  double total = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      total += std::abs(img::luminance(a, x, y) - img::luminance(b, x, y));
  return total / double(a.width * a.height);
}

}  // namespace

TEST_CASE("visual_distance: identity, extremes, symmetry") {
  test::TempDir tmp("vd");
  AlignerConfig cfg;
  Frame black = write_gray_frame(tmp, 0, 0, 128, 72, 0);
  Frame white = write_gray_frame(tmp, 1, 100, 128, 72, 255);
  Frame gray = write_gray_frame(tmp, 2, 200, 128, 72, 96);

  CHECK(visual_distance(black, black, cfg, tmp.path()) == doctest::Approx(0.0));
  CHECK(visual_distance(gray, gray, cfg, tmp.path()) == doctest::Approx(0.0));
  CHECK(visual_distance(black, white, cfg, tmp.path()) == doctest::Approx(1.0));
  CHECK(visual_distance(black, gray, cfg, tmp.path()) ==
        doctest::Approx(visual_distance(gray, black, cfg, tmp.path())));
}

TEST_CASE("visual_distance: toggled quadrant matches the full-res oracle") {
  test::TempDir tmp("vdq");
  AlignerConfig cfg;  // 64x36 grid; 128x72 source aligns cell boundaries
  img::Image base = img::make_image(128, 72, 1, 40);
  img::Image toggled = base;
  for (int y = 0; y < 36; ++y)
    for (int x = 0; x < 64; ++x) toggled.at(x, y) = 220;
  img::save_image(base, tmp.path() / "a.pgm");
  img::save_image(toggled, tmp.path() / "b.pgm");
  Frame fa{0, 0, "a.pgm", 128, 72};
  Frame fb{1, 100, "b.pgm", 128, 72};

  double expected = full_res_mad(base, toggled);
  double got = visual_distance(fa, fb, cfg, tmp.path());
  CHECK(std::abs(got - expected) <= 1e-6);
  CHECK(expected == doctest::Approx(0.25 * 180.0 / 255.0));
}

TEST_CASE("select_keyframe: documented 10-frame click scenario") {
  // Frames every 100 ms; content changes only at 400 ms; pointer idle until
  // 450 ms, moves 450-700, click at 700. Expected keyframe: the 400 ms frame.
  test::TempDir tmp("kf");
  AlignerConfig cfg;
  std::vector<Frame> frames;
  for (int i = 0; i < 10; ++i)
    frames.push_back(write_gray_frame(tmp, i, i * 100, 64, 36,
                                      i * 100 < 400 ? 50 : 180));
  std::vector<RawEvent> events;
  for (std::int64_t t = 450; t < 700; t += 50)
    events.push_back(mouse(t, EventKind::move, 0.3 + double(t - 450) / 1000.0, 0.3));
  events.push_back(mouse(700, EventKind::button_down, 0.55, 0.3, MouseButton::left));
  events.push_back(mouse(740, EventKind::button_up, 0.55, 0.3, MouseButton::left));
  std::size_t down = events.size() - 2;

  int k = select_keyframe(frames, Click{0.55, 0.3, MouseButton::left},
                          {down, down + 1}, events, cfg, tmp.path());
  CHECK(k == 4);  // the frame at t=400
  CHECK(frames[k].t <= 450);
}

TEST_CASE("select_keyframe: key press takes the frame right before the span") {
  test::TempDir tmp("kfk");
  AlignerConfig cfg;
  std::vector<Frame> frames;
  for (int i = 0; i < 6; ++i)
    frames.push_back(write_gray_frame(tmp, i, i * 100, 64, 36, 90));
  std::vector<RawEvent> events = {
      key(340, EventKind::key_down, "enter"),
      key(380, EventKind::key_up, "enter"),
  };
  int k = select_keyframe(frames, Press{"enter"}, {0, 1}, events, cfg, tmp.path());
  CHECK(k == 3);  // latest frame at or before t=340
}

TEST_CASE("select_keyframe: no movement phase backtracks to the last change") {
  test::TempDir tmp("kfc");
  AlignerConfig cfg;
  std::vector<Frame> frames;
  for (int i = 0; i < 10; ++i)
    frames.push_back(write_gray_frame(tmp, i, i * 100, 64, 36,
                                      i * 100 < 400 ? 50 : 180));
  std::vector<RawEvent> events = {
      mouse(700, EventKind::button_down, 0.5, 0.5, MouseButton::left),
      mouse(740, EventKind::button_up, 0.5, 0.5, MouseButton::left),
  };
  int k = select_keyframe(frames, Click{0.5, 0.5, MouseButton::left}, {0, 1},
                          events, cfg, tmp.path());
  CHECK(k == 4);  // t0 = press time; last visually distinct frame before it
}

TEST_CASE("select_keyframe: static screen falls back to the latest frame") {
  test::TempDir tmp("kfs");
  AlignerConfig cfg;
  std::vector<Frame> frames;
  for (int i = 0; i < 8; ++i)
    frames.push_back(write_gray_frame(tmp, i, i * 100, 64, 36, 90));
  std::vector<RawEvent> events = {
      mouse(520, EventKind::button_down, 0.5, 0.5, MouseButton::left),
      mouse(560, EventKind::button_up, 0.5, 0.5, MouseButton::left),
  };
  int k = select_keyframe(frames, Click{0.5, 0.5, MouseButton::left}, {0, 1},
                          events, cfg, tmp.path());
  CHECK(k == 5);  // latest frame at or before the press
}

TEST_CASE("select_keyframe: no frame before the action is an alignment error") {
  test::TempDir tmp("kfe");
  AlignerConfig cfg;
  std::vector<Frame> frames = {write_gray_frame(tmp, 0, 5000, 64, 36, 90)};
  std::vector<RawEvent> events = {
      key(100, EventKind::key_down, "a"),
      key(140, EventKind::key_up, "a"),
  };
  try {
    select_keyframe(frames, Write{"a"}, {0, 1}, events, cfg, tmp.path());
    FAIL("expected alignment_error");
  } catch (const CuaError& e) {
    CHECK(e.code() == Err::alignment_error);
  }
}

TEST_CASE("build_trajectory: appends the terminal terminate step") {
  test::TempDir tmp("bt");
  synth::DemoOptions opts;
  opts.script.min_actions = 3;
  opts.script.max_actions = 3;
  auto demo = synth::make_demo(424242, opts);
  synth::write_demo(demo, tmp.path());

  auto reduced = reduce::reduce(demo.demo, {});
  auto traj = build_trajectory(demo.demo, reduced.actions, {}, tmp.path());

  REQUIRE(traj.steps.size() == reduced.actions.size() + 1);
  CHECK(is_terminate(traj.steps.back().action));
  CHECK(std::get<Terminate>(traj.steps.back().action).status == demo.demo.status);
  CHECK(traj.steps.back().frame_index == int(demo.demo.frames.size()) - 1);
  CHECK(traj.steps.back().span.first == demo.demo.events.size());
  CHECK(check_trajectory(traj).empty());
}

TEST_CASE("build_trajectory: failed demos terminate with failure") {
  test::TempDir tmp("btf");
  synth::DemoOptions opts;
  opts.script.min_actions = 3;
  opts.script.max_actions = 4;
  // seed % 10 == 7 marks the demo failed
  auto demo = synth::make_demo(17, opts);
  REQUIRE(demo.demo.status == TaskStatus::failure);
  synth::write_demo(demo, tmp.path());
  auto reduced = reduce::reduce(demo.demo, {});
  auto traj = build_trajectory(demo.demo, reduced.actions, {}, tmp.path());
  CHECK(std::get<Terminate>(traj.steps.back().action).status == TaskStatus::failure);
}

TEST_CASE("build_trajectory: keyframes strictly increase and never leak") {
  for (std::uint64_t seed : {11u, 23u, 37u, 58u, 71u, 97u}) {
    test::TempDir tmp("btm");
    auto demo = synth::make_demo(seed, {});
    synth::write_demo(demo, tmp.path());
    auto reduced = reduce::reduce(demo.demo, {});
    auto traj = build_trajectory(demo.demo, reduced.actions, {}, tmp.path());

    for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i) {
      bool next_terminal = i + 2 == traj.steps.size();
      if (next_terminal)
        CHECK(traj.steps[i].frame_index <= traj.steps[i + 1].frame_index);
      else
        CHECK(traj.steps[i].frame_index < traj.steps[i + 1].frame_index);
    }
    // No step's keyframe may postdate the first event it explains.
    for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i) {
      const auto& step = traj.steps[i];
      CHECK(demo.demo.frames[std::size_t(step.frame_index)].t <=
            demo.demo.events[step.span.first].t);
    }
  }
}

TEST_CASE("build_trajectory: deterministic across repeated runs") {
  test::TempDir tmp("btd");
  auto demo = synth::make_demo(1234, {});
  synth::write_demo(demo, tmp.path());
  auto reduced = reduce::reduce(demo.demo, {});
  auto a = build_trajectory(demo.demo, reduced.actions, {}, tmp.path());
  auto b = build_trajectory(demo.demo, reduced.actions, {}, tmp.path());
  CHECK(trajectory_to_json(a) == trajectory_to_json(b));
}

TEST_CASE("aligner: malformed configuration is rejected") {
  test::TempDir tmp("cfg");
  std::vector<Frame> frames = {write_gray_frame(tmp, 0, 0, 64, 36, 90)};
  std::vector<RawEvent> events = {key(100, EventKind::key_down, "a"),
                                  key(140, EventKind::key_up, "a")};
  AlignerConfig bad;
  bad.idle_gap = 0;
  CHECK_THROWS_AS(select_keyframe(frames, Write{"a"}, {0, 1}, events, bad, tmp.path()),
                  CuaError);
  AlignerConfig bad2;
  bad2.diff_threshold = 1.0;
  CHECK_THROWS_AS(select_keyframe(frames, Write{"a"}, {0, 1}, events, bad2, tmp.path()),
                  CuaError);
}
