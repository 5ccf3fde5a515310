#include "cua/reducer.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "cua/keys.hpp"
#include "cua/sim.hpp"
#include "cua/util.hpp"

namespace cua::reduce {

using core::AgentAction;
using core::EventKind;
using core::MouseButton;
using core::Point;
using core::RawEvent;

namespace {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Reducer {
  const std::vector<RawEvent>& events;
  const ReducerConfig& cfg;
  ReduceResult out;

  // Pointer position the reduced sequence has established so far.
  Point emitted_ptr = sim::initial_state().pointer;

  // Pending movement run (move events since the last emission).
  std::vector<std::size_t> move_run;
  Point move_end{};

  struct Typing {
    std::string text;
    std::size_t first = 0, last = 0;
    std::int64_t last_key_t = 0;
    bool active = false;
  } typing;
  std::vector<std::size_t> pending_shift;  // shift downs awaiting a printable

  struct Scrolling {
    bool horizontal = false;
    int total = 0;
    std::size_t first = 0, last = 0;
    std::int64_t last_t = 0;
    bool active = false;
  } scrolling;

  // Pending (possibly multi-) click group, waiting for merge candidates.
  struct ClickGroup {
    MouseButton button = MouseButton::left;
    Point pos{};
    int count = 0;
    std::int64_t last_down_t = 0;
    std::size_t first = 0, last = 0;
    bool active = false;
  } group;

  struct Hold {
    MouseButton button = MouseButton::left;
    Point anchor{};
    double max_travel = 0.0;
    std::int64_t down_t = 0;
    std::size_t down_index = 0;
    bool approach_emitted = false;
    bool active = false;
  } hold;

  struct ModHold {
    std::size_t down_index = 0;
    bool used = false;     // consumed by a hotkey or typing run
    bool covered = false;  // down index already inside an emitted span
  };
  std::map<std::string, ModHold> mods;

  struct PendingPress {
    std::string key;
    std::size_t down = 0;
    bool active = false;
  } press;

  struct HotkeyPending {
    std::vector<std::string> combo;
    std::size_t first = 0, down = 0;
    std::string key;
    bool active = false;
  } hotkey_pending;

  Reducer(const std::vector<RawEvent>& ev, const ReducerConfig& c)
      : events(ev), cfg(c) {}

  bool is_mod(const std::string& key) const {
    return cfg.modifier_set.count(key) > 0;
  }

  // Every emission invalidates a pending movement run: moves survive only
  // when they immediately precede the press they lead to.
  void emit(AgentAction action, Span span) {
    move_run.clear();
    if (auto p = core::action_point(action)) emitted_ptr = *p;
    out.actions.push_back({std::move(action), span});
  }

  // A span may only reach back to events no earlier emission has claimed;
  // stale anchors (a modifier held across other activity) fall back to the
  // current index.
  std::size_t unclaimed(std::size_t candidate, std::size_t fallback) const {
    if (!out.actions.empty() && out.actions.back().span.second >= candidate)
      return fallback;
    return candidate;
  }

  void flush_typing() {
    if (!typing.active) return;
    Typing t = typing;
    typing = Typing{};
    if (!t.text.empty()) emit(core::Write{t.text}, {t.first, t.last});
  }

  void flush_scroll() {
    if (!scrolling.active) return;
    Scrolling s = scrolling;
    scrolling = Scrolling{};
    if (s.total == 0) return;
    if (s.horizontal)
      emit(core::HScroll{s.total, 0, std::nullopt}, {s.first, s.last});
    else
      emit(core::Scroll{0, s.total, std::nullopt}, {s.first, s.last});
  }

  void flush_group() {
    if (!group.active) return;
    ClickGroup g = group;
    group = ClickGroup{};
    AgentAction action;
    if (g.count >= 3)
      action = core::TripleClick{g.pos.x, g.pos.y, g.button};
    else if (g.count == 2)
      action = core::DoubleClick{g.pos.x, g.pos.y, g.button};
    else if (g.button == MouseButton::middle)
      action = core::MiddleClick{g.pos.x, g.pos.y};
    else
      action = core::Click{g.pos.x, g.pos.y, g.button};
    emit(std::move(action), {g.first, g.last});
  }

  void flush_press() {
    if (!press.active) return;
    PendingPress p = press;
    press = PendingPress{};
    emit(core::Press{p.key}, {p.down, p.down});
  }

  void flush_hotkey() {
    if (!hotkey_pending.active) return;
    HotkeyPending h = hotkey_pending;
    hotkey_pending = HotkeyPending{};
    emit(core::Hotkey{h.combo}, {h.first, h.down});
  }

  // Pointer position a replay of the reduced output would have right now.
  Point effective_ptr() const { return group.active ? group.pos : emitted_ptr; }

  void on_move(std::size_t i, const RawEvent& e) {
    if (hold.active) {
      if (e.pos) {
        hold.max_travel = std::max(hold.max_travel, dist(hold.anchor, *e.pos));
      }
      return;  // in-hold motion lives inside the gesture span
    }
    flush_typing();
    flush_scroll();
    if (!e.pos) return;
    move_run.push_back(i);
    move_end = *e.pos;
  }

  void on_wheel(std::size_t i, const RawEvent& e) {
    if (hold.active || !e.wheel) {
      if (hold.active)
        out.warnings.push_back("wheel during button hold at event " +
                               std::to_string(i));
      return;
    }
    flush_typing();
    flush_group();
    flush_press();
    move_run.clear();
    int dx = e.wheel->dx, dy = e.wheel->dy;
    if (dx != 0 && dy != 0) {
      out.warnings.push_back("diagonal wheel at event " + std::to_string(i) +
                             "; minor axis discarded");
      if (std::abs(dy) >= std::abs(dx)) dx = 0; else dy = 0;
    }
    if (dx == 0 && dy == 0) return;
    bool horizontal = dx != 0;
    int delta = horizontal ? dx : dy;
    bool mergeable = scrolling.active && scrolling.horizontal == horizontal &&
                     (delta > 0) == (scrolling.total > 0) &&
                     e.t - scrolling.last_t <= cfg.scroll_merge_gap;
    if (!mergeable) flush_scroll();
    if (!scrolling.active) {
      scrolling.active = true;
      scrolling.horizontal = horizontal;
      scrolling.first = i;
      scrolling.total = 0;
    }
    scrolling.total += delta;
    scrolling.last = i;
    scrolling.last_t = e.t;
  }

  void on_button_down(std::size_t i, const RawEvent& e) {
    flush_typing();
    flush_scroll();
    flush_press();
    if (hold.active) {
      out.warnings.push_back("overlapping button holds at event " +
                             std::to_string(i));
      return;
    }
    if (!e.pos || !e.button) return;
    if (!mods.empty())
      out.warnings.push_back("modifier held during click at event " +
                             std::to_string(i) + "; combination not representable");

    Point anchor = *e.pos;
    bool approach = false;
    if (!move_run.empty() &&
        dist(anchor, effective_ptr()) > cfg.multi_click_radius) {
      std::vector<std::size_t> run;
      run.swap(move_run);
      Point target = move_end;
      flush_group();
      emit(core::MoveTo{target.x, target.y}, {run.front(), run.back()});
      approach = true;
    } else {
      move_run.clear();  // jitter inside a click group, or a stale run
    }

    hold = Hold{*e.button, anchor, 0.0, e.t, i, approach, true};
  }

  void on_button_up(std::size_t i, const RawEvent& e) {
    if (!hold.active || !e.button || *e.button != hold.button) return;
    Point release = e.pos ? *e.pos : hold.anchor;
    double travel = std::max(hold.max_travel, dist(hold.anchor, release));
    Hold h = hold;
    hold = Hold{};

    if (travel >= cfg.drag_min_distance) {
      flush_group();
      std::size_t drag_start = h.down_index;
      if (!h.approach_emitted &&
          dist(h.anchor, emitted_ptr) > cfg.multi_click_radius) {
        emit(core::MoveTo{h.anchor.x, h.anchor.y}, {h.down_index, h.down_index});
        drag_start = h.down_index + 1;
      }
      emit(core::DragTo{release.x, release.y}, {drag_start, i});
      return;
    }

    bool merged = group.active && group.button == h.button && group.count < 3 &&
                  h.down_t - group.last_down_t <= cfg.double_click_window &&
                  dist(release, group.pos) <= cfg.multi_click_radius;
    if (!merged) flush_group();
    if (!group.active) {
      group.active = true;
      group.button = h.button;
      group.pos = release;
      group.count = 0;
      group.first = h.down_index;
    }
    group.count += 1;
    group.last = i;
    group.last_down_t = h.down_t;
  }

  void on_key_down(std::size_t i, const RawEvent& e) {
    if (hold.active) {
      out.warnings.push_back("key event during button hold at event " +
                             std::to_string(i));
      return;
    }
    if (!e.key) return;
    std::string key = keys::canonical(*e.key);

    if (is_mod(key)) {
      if (key == "shift") {
        // Shift may extend a typing run or be a bare tap; judge at the next
        // non-shift key or at release.
        flush_scroll();
        flush_group();
        flush_press();
        pending_shift.push_back(i);
        mods["shift"] = ModHold{i, false, typing.active};
      } else {
        flush_typing();
        flush_scroll();
        flush_group();
        flush_press();
        mods[key] = ModHold{i, false, false};
      }
      return;
    }

    bool shift_held = mods.count("shift") > 0;
    bool other_mods = false;
    for (const auto& [m, s] : mods)
      if (m != "shift") other_mods = true;

    if (other_mods || (shift_held && !keys::is_printable(key))) {
      flush_typing();
      flush_scroll();
      flush_group();
      flush_press();
      move_run.clear();
      std::vector<std::string> combo;
      std::size_t first = i;
      for (auto& [m, state] : mods) {
        combo.push_back(m);
        if (!state.used && !state.covered)
          first = std::min(first, unclaimed(state.down_index, i));
        state.used = true;
        state.covered = true;
      }
      pending_shift.clear();
      combo.push_back(key);
      hotkey_pending = HotkeyPending{keys::canonical_hotkey(std::move(combo)),
                                     first, i, key, true};
      return;
    }

    flush_group();
    flush_scroll();
    flush_press();

    if (keys::is_printable(key)) {
      if (typing.active && e.t - typing.last_key_t > cfg.typing_merge_gap)
        flush_typing();
      if (!typing.active) {
        typing.active = true;
        typing.first = i;
        if (!pending_shift.empty())
          typing.first = std::min(typing.first, unclaimed(pending_shift.front(), i));
      }
      pending_shift.clear();
      if (auto it = mods.find("shift"); it != mods.end()) {
        it->second.used = true;
        it->second.covered = true;
      }
      typing.text += keys::character_for(key, shift_held);
      typing.last = i;
      typing.last_key_t = e.t;
      return;
    }

    // Navigation / named key without modifiers.
    flush_typing();
    press = PendingPress{key, i, true};
  }

  void on_key_up(std::size_t i, const RawEvent& e) {
    if (hold.active || !e.key) return;
    std::string key = keys::canonical(*e.key);

    // The awaited key_up is evidently not next; close the combo now so
    // nothing emitted below can slip in front of it.
    if (hotkey_pending.active && hotkey_pending.key != key) flush_hotkey();

    if (is_mod(key)) {
      auto it = mods.find(key);
      bool used = it != mods.end() && it->second.used;
      std::size_t down_index = it != mods.end() ? it->second.down_index : i;
      if (it != mods.end()) mods.erase(it);
      if (key == "shift" && typing.active && used) {
        typing.last = i;  // release inside the typing run it shifted
        return;
      }
      if (used) {
        flush_hotkey();
        // Cover the release by extending the adjacent emitted span.
        if (!out.actions.empty() && out.actions.back().span.second + 1 == i)
          out.actions.back().span.second = i;
        return;
      }
      // Bare modifier tap. If something was emitted while the key was held,
      // the down index is no longer coverable by a contiguous span.
      flush_typing();
      flush_scroll();
      flush_group();
      flush_press();
      pending_shift.clear();
      emit(core::Press{key}, {unclaimed(down_index, i), i});
      return;
    }

    if (hotkey_pending.active && hotkey_pending.key == key) {
      HotkeyPending h = hotkey_pending;
      hotkey_pending = HotkeyPending{};
      emit(core::Hotkey{h.combo}, {h.first, i});
      return;
    }
    if (press.active && press.key == key) {
      PendingPress p = press;
      press = PendingPress{};
      emit(core::Press{p.key}, {p.down, i});
      return;
    }
    if (typing.active) {
      typing.last = i;
      return;
    }
    flush_scroll();  // a stray key release still breaks a wheel run
  }

  ReduceResult run() {
    for (std::size_t i = 0; i < events.size(); ++i) {
      const RawEvent& e = events[i];
      if (hotkey_pending.active && e.kind != EventKind::key_up) flush_hotkey();
      switch (e.kind) {
        case EventKind::move: on_move(i, e); break;
        case EventKind::wheel: on_wheel(i, e); break;
        case EventKind::button_down: on_button_down(i, e); break;
        case EventKind::button_up: on_button_up(i, e); break;
        case EventKind::key_down: on_key_down(i, e); break;
        case EventKind::key_up: on_key_up(i, e); break;
      }
    }
    if (hold.active)
      out.warnings.push_back("button held at end of stream; gesture dropped");
    flush_hotkey();
    flush_typing();
    flush_scroll();
    flush_press();
    flush_group();

    // Anything outside an emitted span was dropped (move samples etc.).
    std::vector<bool> covered(events.size(), false);
    for (const auto& ra : out.actions)
      for (std::size_t i = ra.span.first; i <= ra.span.second && i < events.size(); ++i)
        covered[i] = true;
    for (std::size_t i = 0; i < events.size(); ++i)
      if (!covered[i]) out.dropped.push_back(i);

    return std::move(out);
  }
};

}  // namespace

ReduceResult reduce_events(const std::vector<RawEvent>& events,
                           const ReducerConfig& cfg) {
  if (cfg.double_click_window <= 0 || cfg.scroll_merge_gap <= 0 ||
      cfg.typing_merge_gap <= 0)
    throw CuaError(Err::input_error, "reducer windows must be positive");
  if (cfg.multi_click_radius <= 0 || cfg.multi_click_radius >= 1 ||
      cfg.drag_min_distance <= 0 || cfg.drag_min_distance >= 1)
    throw CuaError(Err::input_error,
                   "reducer distances must lie strictly inside (0,1)");
  Reducer r(events, cfg);
  return r.run();
}

ReduceResult reduce(const core::RawDemonstration& demo, const ReducerConfig& cfg) {
  return reduce_events(demo.events, cfg);
}

std::vector<AgentAction> actions_of(const ReduceResult& result) {
  std::vector<AgentAction> out;
  out.reserve(result.actions.size());
  for (const auto& ra : result.actions) out.push_back(ra.action);
  return out;
}

}  // namespace cua::reduce
