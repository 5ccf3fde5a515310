#include "cua/sim.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cua/keys.hpp"
#include "cua/util.hpp"

namespace cua::sim {

using core::AgentAction;
using core::Point;
using core::RawEvent;

namespace {

double dist(Point a, Point b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::string fmt_point(Point p) {
  return format_coord(p.x) + "," + format_coord(p.y);
}

void log_click(SimState& s, const char* what, core::MouseButton b, Point p) {
  s.click_log.push_back(std::string(what) + " " + core::button_name(b) + " @" +
                        fmt_point(p));
  s.pointer = p;
  s.focus = focus_key(p);
}

}  // namespace

SimState initial_state() { return SimState{}; }

std::string focus_key(Point p) {
  // 0.01 grid: coarse enough to absorb double-click jitter.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f:%.2f", p.x, p.y);
  return buf;
}

SimState replay(const std::vector<AgentAction>& actions, SimState state) {
  struct V {
    SimState& s;
    void operator()(const core::Click& c) {
      log_click(s, "click", c.button, {c.x, c.y});
    }
    void operator()(const core::MiddleClick& c) {
      log_click(s, "click", core::MouseButton::middle, {c.x, c.y});
    }
    void operator()(const core::DoubleClick& c) {
      log_click(s, "click", c.button, {c.x, c.y});
      log_click(s, "click", c.button, {c.x, c.y});
    }
    void operator()(const core::TripleClick& c) {
      log_click(s, "click", c.button, {c.x, c.y});
      log_click(s, "click", c.button, {c.x, c.y});
      log_click(s, "click", c.button, {c.x, c.y});
    }
    void operator()(const core::MoveTo& m) { s.pointer = {m.x, m.y}; }
    void operator()(const core::DragTo& d) {
      s.click_log.push_back("drag " + fmt_point(s.pointer) + "->" +
                            fmt_point({d.x, d.y}));
      s.pointer = {d.x, d.y};
    }
    void operator()(const core::Scroll& sc) {
      s.scroll_x += sc.dx;
      s.scroll_y += sc.dy;
    }
    void operator()(const core::HScroll& sc) {
      s.scroll_x += sc.dx;
      s.scroll_y += sc.dy;
    }
    void operator()(const core::Write& w) { s.text[s.focus] += w.text; }
    void operator()(const core::Press& p) {
      s.click_log.push_back("press " + p.key);
    }
    void operator()(const core::Hotkey& h) {
      std::string line = "hotkey";
      for (const auto& k : h.keys) line += " " + k;
      s.click_log.push_back(line);
    }
    void operator()(const core::Wait&) {}  // no-op tick
    void operator()(const core::Terminate& t) {
      s.click_log.push_back("terminate " + core::status_name(t.status));
    }
  };
  for (const AgentAction& a : actions) std::visit(V{state}, a);
  return state;
}

SimState replay_events(const std::vector<RawEvent>& events, SimState state,
                       double drag_min_distance) {
  struct Hold {
    Point anchor;
    double max_travel = 0.0;
  };
  std::map<core::MouseButton, Hold> holds;
  // A modifier hold that feeds no key is a bare tap and logs as a press.
  std::map<std::string, bool> mod_used;

  for (const RawEvent& e : events) {
    switch (e.kind) {
      case core::EventKind::move:
        if (e.pos) {
          state.pointer = *e.pos;
          for (auto& [b, hold] : holds)
            hold.max_travel = std::max(hold.max_travel, dist(hold.anchor, *e.pos));
        }
        break;
      case core::EventKind::button_down:
        if (e.pos) state.pointer = *e.pos;
        if (e.button && e.pos) holds[*e.button] = Hold{*e.pos, 0.0};
        break;
      case core::EventKind::button_up: {
        if (e.pos) state.pointer = *e.pos;
        if (!e.button) break;
        auto it = holds.find(*e.button);
        if (it == holds.end()) break;
        Point anchor = it->second.anchor;
        double travel = it->second.max_travel;
        if (e.pos) travel = std::max(travel, dist(anchor, *e.pos));
        holds.erase(it);
        if (travel >= drag_min_distance && e.pos) {
          state.click_log.push_back("drag " + fmt_point(anchor) + "->" +
                                    fmt_point(*e.pos));
        } else if (e.pos) {
          log_click(state, "click", *e.button, *e.pos);
        }
        break;
      }
      case core::EventKind::wheel:
        if (e.wheel) {
          state.scroll_x += e.wheel->dx;
          state.scroll_y += e.wheel->dy;
        }
        break;
      case core::EventKind::key_down: {
        if (!e.key) break;
        std::string key = keys::canonical(*e.key);
        if (keys::is_modifier(key)) {
          state.held_modifiers.insert(key);
          mod_used[key] = false;
          break;
        }
        for (auto& [m, used] : mod_used)
          if (state.held_modifiers.count(m)) used = true;
        bool shift = state.held_modifiers.count("shift") > 0;
        bool other_mods = false;
        for (const auto& m : state.held_modifiers)
          if (m != "shift") other_mods = true;
        if (other_mods) {
          std::vector<std::string> combo(state.held_modifiers.begin(),
                                         state.held_modifiers.end());
          combo.push_back(key);
          combo = keys::canonical_hotkey(std::move(combo));
          std::string line = "hotkey";
          for (const auto& k : combo) line += " " + k;
          state.click_log.push_back(line);
        } else if (keys::is_printable(key)) {
          state.text[state.focus] += keys::character_for(key, shift);
        } else if (shift) {
          state.click_log.push_back("hotkey shift " + key);
        } else {
          state.click_log.push_back("press " + key);
        }
        break;
      }
      case core::EventKind::key_up:
        if (e.key) {
          std::string key = keys::canonical(*e.key);
          if (keys::is_modifier(key)) {
            state.held_modifiers.erase(key);
            auto it = mod_used.find(key);
            if (it != mod_used.end() && !it->second)
              state.click_log.push_back("press " + key);
            if (it != mod_used.end()) mod_used.erase(it);
          }
        }
        break;
    }
  }
  return state;
}

std::string describe(const SimState& s) {
  std::ostringstream out;
  out << "pointer=" << fmt_point(s.pointer) << " focus=" << s.focus
      << " scroll=(" << s.scroll_x << "," << s.scroll_y << ")";
  out << " mods={";
  for (const auto& m : s.held_modifiers) out << m << " ";
  out << "} buffers={";
  for (const auto& [k, v] : s.text) out << k << ":'" << v << "' ";
  out << "} log=[";
  for (const auto& l : s.click_log) out << l << "; ";
  out << "]";
  return out.str();
}

}  // namespace cua::sim
