#include "cua/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cua/demo_io.hpp"
#include "cua/dsl.hpp"
#include "cua/image.hpp"
#include "cua/keys.hpp"
#include "cua/sim.hpp"
#include "cua/util.hpp"

namespace cua::synth {

using core::AgentAction;
using core::EventKind;
using core::MouseButton;
using core::Point;
using core::RawEvent;

namespace {

// rng() % n is deterministic across standard libraries, unlike the
// distribution templates.
std::int64_t rint(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + std::int64_t(rng() % std::uint64_t(hi - lo + 1));
}

double runif(std::mt19937_64& rng) {
  return double(rng() >> 11) / 9007199254740992.0;  // [0,1) at 2^-53
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point random_point(std::mt19937_64& rng) {
  return {quantize_coord(0.02 + 0.96 * runif(rng)),
          quantize_coord(0.02 + 0.96 * runif(rng))};
}

Point fresh_target(std::mt19937_64& rng, Point current) {
  for (int i = 0; i < 64; ++i) {
    Point p = random_point(rng);
    if (dist(p, current) >= 0.08) return p;
  }
  return {quantize_coord(std::fmod(current.x + 0.5, 1.0)),
          quantize_coord(std::fmod(current.y + 0.5, 1.0))};
}

const char* kNavKeys[] = {"enter", "esc",  "tab",  "backspace", "delete",
                          "home",  "end",  "pageup", "pagedown", "up",
                          "down",  "left", "right", "f5"};

const char kWriteChars[] =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,!?";

}  // namespace

std::vector<AgentAction> generate_script(std::mt19937_64& rng,
                                         const ScriptOptions& opts) {
  std::vector<AgentAction> script;
  Point pointer = sim::initial_state().pointer;
  int n = int(rint(rng, opts.min_actions, opts.max_actions));
  bool last_was_write = false;

  auto push_gesture = [&](Point p) {
    switch (rint(rng, 0, 5)) {
      case 0:
      case 1: script.push_back(core::Click{p.x, p.y, MouseButton::left}); break;
      case 2: script.push_back(core::Click{p.x, p.y, MouseButton::right}); break;
      case 3: script.push_back(core::DoubleClick{p.x, p.y, MouseButton::left}); break;
      case 4: script.push_back(core::TripleClick{p.x, p.y, MouseButton::left}); break;
      default: script.push_back(core::MiddleClick{p.x, p.y}); break;
    }
    pointer = p;
  };

  for (int i = 0; i < n; ++i) {
    int choice = int(rint(rng, 0, 9));
    if (last_was_write && choice == 7) choice = 0;  // writes never adjoin
    last_was_write = false;
    switch (choice) {
      case 0:
      case 1: {  // move to a fresh target, then a click gesture there
        Point p = fresh_target(rng, pointer);
        script.push_back(core::MoveTo{p.x, p.y});
        push_gesture(p);
        break;
      }
      case 2: {  // repeat gesture at the current position
        push_gesture(pointer);
        break;
      }
      case 3: {  // move + drag
        Point p = fresh_target(rng, pointer);
        Point q = fresh_target(rng, p);
        script.push_back(core::MoveTo{p.x, p.y});
        script.push_back(core::DragTo{q.x, q.y});
        pointer = q;
        break;
      }
      case 4: {  // drag starting at the current position
        Point q = fresh_target(rng, pointer);
        script.push_back(core::DragTo{q.x, q.y});
        pointer = q;
        break;
      }
      case 5: {
        int dy = int(rint(rng, 1, 8)) * (rint(rng, 0, 1) ? 1 : -1);
        script.push_back(core::Scroll{0, dy, std::nullopt});
        break;
      }
      case 6: {
        int dx = int(rint(rng, 1, 6)) * (rint(rng, 0, 1) ? 1 : -1);
        script.push_back(core::HScroll{dx, 0, std::nullopt});
        break;
      }
      case 7: {
        int len = int(rint(rng, 1, 10));
        std::string text;
        for (int k = 0; k < len; ++k)
          text += kWriteChars[rint(rng, 0, sizeof(kWriteChars) - 2)];
        script.push_back(core::Write{text});
        last_was_write = true;
        break;
      }
      case 8: {
        if (rint(rng, 0, 5) == 0) {
          const char* mods[] = {"ctrl", "alt", "shift"};
          script.push_back(core::Press{mods[rint(rng, 0, 2)]});
        } else {
          script.push_back(core::Press{kNavKeys[rint(rng, 0, std::size(kNavKeys) - 1)]});
        }
        break;
      }
      default: {
        std::vector<std::string> combo;
        const char* primary[] = {"ctrl", "alt", "cmd", "win"};
        combo.push_back(primary[rint(rng, 0, 3)]);
        if (rint(rng, 0, 2) == 0) combo.push_back("shift");
        std::string key;
        if (rint(rng, 0, 3) == 0)
          key = kNavKeys[rint(rng, 0, std::size(kNavKeys) - 1)];
        else
          key = std::string(1, char('a' + rint(rng, 0, 25)));
        combo.push_back(key);
        script.push_back(core::Hotkey{keys::canonical_hotkey(combo)});
        break;
      }
    }
  }
  return script;
}

namespace {

struct Lowering {
  std::mt19937_64& rng;
  Lowered out;
  std::int64_t t = 1000;
  Point pointer = sim::initial_state().pointer;
  std::int64_t motion_start = -1;  // approach run, stale unless just moved
  std::int64_t motion_end = -1;

  explicit Lowering(std::mt19937_64& r) : rng(r) {}

  void push(RawEvent e) { out.events.push_back(std::move(e)); }

  RawEvent mouse_event(EventKind kind, Point p) {
    RawEvent e;
    e.t = t;
    e.device = core::Device::mouse;
    e.kind = kind;
    e.pos = Point{quantize_coord(p.x), quantize_coord(p.y)};
    return e;
  }

  RawEvent key_event(EventKind kind, const std::string& key) {
    RawEvent e;
    e.t = t;
    e.device = core::Device::keyboard;
    e.kind = kind;
    e.key = key;
    return e;
  }

  // Jittered sample path ending exactly at the target.
  void move_path(Point target) {
    t += 400 + rint(rng, 0, 200);  // settle gap: a fresh movement phase
    int samples = int(rint(rng, 5, 8));
    motion_start = t;
    Point from = pointer;
    for (int i = 1; i <= samples; ++i) {
      double f = double(i) / samples;
      Point p;
      if (i == samples) {
        p = target;
      } else {
        p.x = std::clamp(from.x + (target.x - from.x) * f +
                             (runif(rng) - 0.5) * 0.004, 0.0, 1.0);
        p.y = std::clamp(from.y + (target.y - from.y) * f +
                             (runif(rng) - 0.5) * 0.004, 0.0, 1.0);
      }
      push(mouse_event(EventKind::move, p));
      motion_end = t;
      t += rint(rng, 25, 40);
    }
    pointer = target;
  }

  void stale_motion() { motion_start = motion_end = -1; }

  ActionTruth press_truth(const AgentAction& a, std::int64_t first_t,
                          std::int64_t press_t) const {
    ActionTruth truth;
    truth.action = a;
    truth.first_t = first_t;
    truth.press_t = press_t;
    truth.press_gesture = true;
    truth.premove_start =
        (motion_end >= 0 && press_t - motion_end <= 300) ? motion_start : press_t;
    return truth;
  }

  void click_pair(Point p, MouseButton b) {
    push([&] { auto e = mouse_event(EventKind::button_down, p); e.button = b; return e; }());
    t += rint(rng, 40, 90);
    push([&] { auto e = mouse_event(EventKind::button_up, p); e.button = b; return e; }());
  }

  void lower(const AgentAction& action) {
    struct V {
      Lowering& L;
      const AgentAction& a;
      void multi_click(Point p, MouseButton b, int count) {
        L.t += rint(L.rng, 40, 120);
        std::int64_t press_t = L.t;
        for (int i = 0; i < count; ++i) {
          if (i) L.t += rint(L.rng, 60, 160);
          L.click_pair(p, b);
        }
        L.out.truth.push_back(L.press_truth(a, press_t, press_t));
        L.pointer = p;
        L.stale_motion();
        L.t += 700 + rint(L.rng, 0, 300);
      }
      void operator()(const core::Click& c) {
        multi_click({c.x, c.y}, c.button, 1);
      }
      void operator()(const core::MiddleClick& c) {
        multi_click({c.x, c.y}, MouseButton::middle, 1);
      }
      void operator()(const core::DoubleClick& c) {
        multi_click({c.x, c.y}, c.button, 2);
      }
      void operator()(const core::TripleClick& c) {
        multi_click({c.x, c.y}, c.button, 3);
      }
      void operator()(const core::MoveTo& m) {
        L.move_path({m.x, m.y});
        ActionTruth truth;
        truth.action = a;
        truth.first_t = L.motion_start;
        truth.premove_start = L.motion_start;
        L.out.truth.push_back(truth);
        // Motion stays fresh: the next press links to this approach.
      }
      void operator()(const core::DragTo& d) {
        L.t += rint(L.rng, 40, 120);
        std::int64_t press_t = L.t;
        Point anchor = L.pointer;
        L.push([&] {
          auto e = L.mouse_event(EventKind::button_down, anchor);
          e.button = MouseButton::left;
          return e;
        }());
        ActionTruth truth = L.press_truth(a, press_t, press_t);
        // In-hold path to the target.
        int samples = int(rint(L.rng, 3, 7));
        Point target{d.x, d.y};
        for (int i = 1; i <= samples; ++i) {
          L.t += rint(L.rng, 20, 40);
          double f = double(i) / samples;
          Point p = i == samples
                        ? target
                        : Point{std::clamp(anchor.x + (target.x - anchor.x) * f, 0.0, 1.0),
                                std::clamp(anchor.y + (target.y - anchor.y) * f, 0.0, 1.0)};
          L.push(L.mouse_event(EventKind::move, p));
        }
        L.t += rint(L.rng, 20, 50);
        L.push([&] {
          auto e = L.mouse_event(EventKind::button_up, target);
          e.button = MouseButton::left;
          return e;
        }());
        L.out.truth.push_back(truth);
        L.pointer = target;
        L.stale_motion();
        L.t += 700 + rint(L.rng, 0, 300);
      }
      void scroll_events(int total, bool horizontal) {
        L.t += rint(L.rng, 50, 200);
        std::int64_t first_t = L.t;
        int remaining = std::abs(total);
        int sign = total > 0 ? 1 : -1;
        int bursts = int(rint(L.rng, 1, std::min(3, remaining)));
        for (int i = 0; i < bursts; ++i) {
          int part = i + 1 == bursts ? remaining
                                     : int(rint(L.rng, 1, remaining - (bursts - i - 1)));
          remaining -= part;
          RawEvent e;
          e.t = L.t;
          e.device = core::Device::mouse;
          e.kind = EventKind::wheel;
          e.wheel = horizontal ? core::WheelDelta{part * sign, 0}
                               : core::WheelDelta{0, part * sign};
          L.push(std::move(e));
          if (i + 1 < bursts) L.t += rint(L.rng, 60, 250);
        }
        ActionTruth truth;
        truth.action = a;
        truth.first_t = first_t;
        truth.premove_start = first_t;
        L.out.truth.push_back(truth);
        L.stale_motion();
        L.t += 1100 + rint(L.rng, 0, 200);
      }
      void operator()(const core::Scroll& s) { scroll_events(s.dy, false); }
      void operator()(const core::HScroll& s) { scroll_events(s.dx, true); }
      void operator()(const core::Write& w) {
        L.t += rint(L.rng, 100, 300);
        std::int64_t first_t = L.t;
        for (char c : w.text) {
          auto ks = keys::keystroke_for(c);
          if (!ks) continue;
          if (ks->shift) {
            L.push(L.key_event(EventKind::key_down, "shift"));
            L.t += rint(L.rng, 15, 40);
          }
          L.push(L.key_event(EventKind::key_down, ks->key));
          L.t += rint(L.rng, 20, 60);
          L.push(L.key_event(EventKind::key_up, ks->key));
          if (ks->shift) {
            L.t += rint(L.rng, 10, 30);
            L.push(L.key_event(EventKind::key_up, "shift"));
          }
          L.t += rint(L.rng, 60, 350);
        }
        ActionTruth truth;
        truth.action = a;
        truth.first_t = first_t;
        truth.premove_start = first_t;
        L.out.truth.push_back(truth);
        L.stale_motion();
        L.t += 400 + rint(L.rng, 0, 200);
      }
      void operator()(const core::Press& p) {
        L.t += rint(L.rng, 80, 250);
        std::int64_t first_t = L.t;
        L.push(L.key_event(EventKind::key_down, p.key));
        L.t += rint(L.rng, 30, 80);
        L.push(L.key_event(EventKind::key_up, p.key));
        ActionTruth truth;
        truth.action = a;
        truth.first_t = first_t;
        truth.premove_start = first_t;
        L.out.truth.push_back(truth);
        L.stale_motion();
        L.t += 300 + rint(L.rng, 0, 150);
      }
      void operator()(const core::Hotkey& h) {
        L.t += rint(L.rng, 80, 250);
        std::int64_t first_t = L.t;
        std::vector<std::string> mods;
        std::string key = h.keys.back();
        for (std::size_t i = 0; i + 1 < h.keys.size(); ++i) mods.push_back(h.keys[i]);
        for (const auto& m : mods) {
          L.push(L.key_event(EventKind::key_down, m));
          L.t += rint(L.rng, 20, 50);
        }
        L.push(L.key_event(EventKind::key_down, key));
        L.t += rint(L.rng, 30, 80);
        L.push(L.key_event(EventKind::key_up, key));
        for (auto it = mods.rbegin(); it != mods.rend(); ++it) {
          L.t += rint(L.rng, 20, 50);
          L.push(L.key_event(EventKind::key_up, *it));
        }
        ActionTruth truth;
        truth.action = a;
        truth.first_t = first_t;
        truth.premove_start = first_t;
        L.out.truth.push_back(truth);
        L.stale_motion();
        L.t += 300 + rint(L.rng, 0, 150);
      }
      void operator()(const core::Wait&) {}
      void operator()(const core::Terminate&) {}
    };
    std::visit(V{*this, action}, action);
  }
};

}  // namespace

Lowered lower_script(const std::vector<AgentAction>& script,
                     std::mt19937_64& rng) {
  Lowering lowering(rng);
  for (const AgentAction& a : script) lowering.lower(a);
  lowering.out.end_t = lowering.t;
  return std::move(lowering.out);
}

SynthDemo make_demo(std::uint64_t seed, const DemoOptions& opts) {
  std::mt19937_64 rng(seed);
  SynthDemo out;
  out.script = generate_script(rng, opts.script);
  Lowered lowered = lower_script(out.script, rng);
  out.truth = lowered.truth;

  core::RawDemonstration& demo = out.demo;
  demo.instruction =
      "Synthetic demonstration " + std::to_string(seed) +
      ": drive the recorded interface through the scripted gestures.";
  switch (seed % 3) {
    case 0: demo.os = core::Os::windows; break;
    case 1: demo.os = core::Os::macos; break;
    default: demo.os = core::Os::ubuntu; break;
  }
  demo.resolution = opts.resolution;
  demo.status = (seed % 10 == 7) ? core::TaskStatus::failure
                                 : core::TaskStatus::success;
  demo.epoch = 0;
  demo.events = std::move(lowered.events);

  // Screen content changes shortly after a gesture completes, well before
  // the next approach begins.
  for (std::size_t i = 0; i < out.truth.size(); ++i) {
    if (core::action_kind(out.truth[i].action) == core::ActionKind::move_to)
      continue;
    if (runif(rng) > opts.change_probability) continue;
    std::int64_t effect_t = i + 1 < out.truth.size()
                                ? out.truth[i + 1].first_t
                                : lowered.end_t;
    // Between this gesture's last event and the next gesture.
    std::int64_t gesture_end = effect_t - 150;
    if (gesture_end <= out.truth[i].first_t) continue;
    out.change_times.push_back(gesture_end);
  }

  std::int64_t horizon = lowered.end_t + 300;
  int index = 0;
  for (std::int64_t ft = 0; ft <= horizon; ft += opts.frame_interval) {
    core::Frame f;
    f.index = index;
    f.t = ft;
    char name[32];
    std::snprintf(name, sizeof name, "frames/%06d.pgm", index);
    f.file = name;
    f.width = opts.frame_width;
    f.height = opts.frame_height;
    demo.frames.push_back(f);
    ++index;
  }
  return out;
}

namespace {

int content_version(const std::vector<std::int64_t>& changes, std::int64_t t) {
  int v = 0;
  for (std::int64_t c : changes)
    if (c <= t) ++v;
  return v;
}

std::uint8_t content_gray(int version) {
  return std::uint8_t((16 + 24 * version) % 256);
}

}  // namespace

void write_demo(const SynthDemo& demo, const std::filesystem::path& dir) {
  core::save_demonstration(demo.demo, dir);
  for (const core::Frame& f : demo.demo.frames) {
    int version = content_version(demo.change_times, f.t);
    img::Image im = img::make_image(f.width, f.height, 1, content_gray(version));
    img::save_image(im, dir / f.file);
  }
}

std::vector<SynthDemo> write_corpus(const std::filesystem::path& root, int count,
                                    std::uint64_t seed, const DemoOptions& opts) {
  std::vector<SynthDemo> demos;
  for (int i = 0; i < count; ++i) {
    SynthDemo d = make_demo(seed + std::uint64_t(i) * 1000003, opts);
    char name[32];
    std::snprintf(name, sizeof name, "demo_%04d", i);
    write_demo(d, root / name);
    demos.push_back(std::move(d));
  }
  return demos;
}

namespace {

bench::BBox box_around(Point p, double half) {
  bench::BBox b;
  b.x_min = std::max(0.0, p.x - half);
  b.x_max = std::min(1.0, p.x + half);
  b.y_min = std::max(0.0, p.y - half);
  b.y_max = std::min(1.0, p.y + half);
  return b;
}

// Pointer position before each script step, per replay semantics.
std::vector<Point> pointer_trail(const std::vector<AgentAction>& script) {
  std::vector<Point> trail;
  Point p = sim::initial_state().pointer;
  for (const AgentAction& a : script) {
    trail.push_back(p);
    if (auto pt = core::action_point(a)) p = *pt;
  }
  trail.push_back(p);
  return trail;
}

}  // namespace

bench::BenchTask bench_task_from(const SynthDemo& demo, const std::string& id) {
  bench::BenchTask task;
  task.id = id;
  task.instruction = demo.demo.instruction;
  task.os = demo.demo.os;
  task.resolution = demo.demo.resolution;
  std::mt19937_64 rng(std::hash<std::string>{}(id));
  auto trail = pointer_trail(demo.script);

  for (std::size_t i = 0; i < demo.script.size(); ++i) {
    const AgentAction& a = demo.script[i];
    bench::BenchStep step;
    bench::GoldOption gold;
    gold.kind = core::action_kind(a);
    switch (gold.kind) {
      case core::ActionKind::click:
        gold.button = std::get<core::Click>(a).button;
        gold.bbox = box_around(*core::action_point(a), 0.04);
        break;
      case core::ActionKind::double_click:
        gold.button = std::get<core::DoubleClick>(a).button;
        gold.bbox = box_around(*core::action_point(a), 0.04);
        break;
      case core::ActionKind::triple_click:
        gold.button = std::get<core::TripleClick>(a).button;
        gold.bbox = box_around(*core::action_point(a), 0.04);
        break;
      case core::ActionKind::middle_click:
      case core::ActionKind::move_to:
      case core::ActionKind::drag_to:
        gold.bbox = box_around(*core::action_point(a), 0.04);
        break;
      case core::ActionKind::scroll: {
        const auto& s = std::get<core::Scroll>(a);
        gold.direction = s.dy < 0 ? bench::ScrollDirection::down
                                  : bench::ScrollDirection::up;
        gold.bbox = box_around(trail[i], 0.04);
        break;
      }
      case core::ActionKind::hscroll: {
        const auto& s = std::get<core::HScroll>(a);
        gold.kind = core::ActionKind::scroll;
        gold.direction = s.dx < 0 ? bench::ScrollDirection::left
                                  : bench::ScrollDirection::right;
        gold.bbox = box_around(trail[i], 0.04);
        break;
      }
      case core::ActionKind::write:
        gold.target_text = std::get<core::Write>(a).text;
        gold.max_edit_distance = 0.1;
        break;
      case core::ActionKind::press:
        gold.keys = {std::get<core::Press>(a).key};
        break;
      case core::ActionKind::hotkey:
        gold.keys = std::get<core::Hotkey>(a).keys;
        break;
      default:
        break;
    }
    // Occasionally lead with a plausible alternative that will not match,
    // exercising the disjunctive option list.
    if (rng() % 3 == 0) {
      bench::GoldOption alt;
      alt.kind = core::ActionKind::click;
      alt.button = MouseButton::left;
      Point corner{trail[i].x > 0.5 ? 0.02 : 0.98, trail[i].y > 0.5 ? 0.02 : 0.98};
      alt.bbox = box_around(corner, 0.01);
      step.options.push_back(alt);
    }
    step.options.push_back(gold);
    task.steps.push_back(std::move(step));
  }

  bench::BenchStep final_step;
  bench::GoldOption terminate;
  terminate.kind = core::ActionKind::terminate;
  terminate.status = demo.demo.status;
  final_step.options.push_back(terminate);
  task.steps.push_back(std::move(final_step));
  return task;
}

std::vector<std::string> perfect_responses(const SynthDemo& demo) {
  std::vector<std::string> responses;
  auto trail = pointer_trail(demo.script);
  for (std::size_t i = 0; i < demo.script.size(); ++i) {
    AgentAction a = demo.script[i];
    if (auto* s = std::get_if<core::Scroll>(&a)) s->pos = trail[i];
    if (auto* s = std::get_if<core::HScroll>(&a)) s->pos = trail[i];
    std::string code = dsl::render_action(a);
    responses.push_back("## Thought:\nProceed with the scripted interaction.\n\n"
                        "## Action:\nExecute the next recorded gesture.\n\n"
                        "## Code:\n```python\n" + code + "\n```\n");
  }
  AgentAction term = core::Terminate{demo.demo.status};
  responses.push_back("## Thought:\nThe task goal is reached.\n\n"
                      "## Action:\nTerminate the session.\n\n"
                      "## Code:\n```python\n" + dsl::render_action(term) + "\n```\n");
  return responses;
}

}  // namespace cua::synth
