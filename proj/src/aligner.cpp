#include "cua/aligner.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "cua/image.hpp"
#include "cua/util.hpp"

namespace cua::align {

using core::ActionKind;
using core::AgentAction;
using core::Frame;
using core::RawEvent;

namespace {

bool press_initiated(const AgentAction& a) {
  switch (core::action_kind(a)) {
    case ActionKind::click:
    case ActionKind::middle_click:
    case ActionKind::double_click:
    case ActionKind::triple_click:
    case ActionKind::drag_to:
    case ActionKind::move_to:  // movement preamble backtracks the same way
      return true;
    default:
      return false;
  }
}

// Downsampled luminance planes, cached per frame index.
class FrameCache {
 public:
  FrameCache(const std::vector<Frame>& frames, const AlignerConfig& cfg,
             const std::filesystem::path& dir)
      : frames_(frames), cfg_(cfg), dir_(dir) {}

  const std::vector<double>& luma(std::size_t index) {
    auto it = cache_.find(index);
    if (it != cache_.end()) return it->second;
    img::Image im = img::load_image(dir_ / frames_[index].file);
    auto plane = img::downsample_luma(im, cfg_.downsample_width,
                                      cfg_.downsample_height);
    return cache_.emplace(index, std::move(plane)).first->second;
  }

  double distance(std::size_t a, std::size_t b) {
    const auto& pa = luma(a);
    const auto& pb = luma(b);
    double total = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) total += std::abs(pa[i] - pb[i]);
    return total / double(pa.size());
  }

 private:
  const std::vector<Frame>& frames_;
  const AlignerConfig& cfg_;
  std::filesystem::path dir_;
  std::map<std::size_t, std::vector<double>> cache_;
};

// Start of the pre-movement phase: walk back from the press through the
// continuous motion run; a gap over idle_gap, or any non-move event, ends it.
std::int64_t pre_movement_start(const std::vector<RawEvent>& events,
                                std::size_t press_index, std::int64_t press_t,
                                std::int64_t idle_gap) {
  std::int64_t t0 = press_t;
  std::int64_t last_motion_t = press_t;
  for (std::size_t j = press_index; j-- > 0;) {
    const RawEvent& e = events[j];
    if (e.kind != core::EventKind::move) break;
    if (last_motion_t - e.t > idle_gap) break;
    t0 = e.t;
    last_motion_t = e.t;
  }
  return t0;
}

void check_config(const AlignerConfig& cfg) {
  if (cfg.idle_gap <= 0)
    throw CuaError(Err::input_error, "idle_gap must be positive");
  if (cfg.diff_threshold <= 0 || cfg.diff_threshold >= 1)
    throw CuaError(Err::input_error, "diff_threshold must lie inside (0,1)");
  if (cfg.downsample_width <= 0 || cfg.downsample_height <= 0)
    throw CuaError(Err::input_error, "downsample target must be positive");
}

int select_with_cache(const std::vector<Frame>& frames, const AgentAction& action,
                      reduce::Span span, const std::vector<RawEvent>& events,
                      const AlignerConfig& cfg, FrameCache& cache) {
  if (frames.empty())
    throw CuaError(Err::alignment_error, "no frames available");
  if (span.first >= events.size())
    throw CuaError(Err::alignment_error, "span outside the event stream");

  std::int64_t cutoff;
  bool backtrack = press_initiated(action);
  if (backtrack) {
    // Locate the press (first button_down in the span; a moveTo span holds
    // only motion, so its start stands in for the press).
    std::size_t press_index = span.first;
    std::int64_t press_t = events[span.first].t;
    for (std::size_t i = span.first; i <= span.second && i < events.size(); ++i) {
      if (events[i].kind == core::EventKind::button_down) {
        press_index = i;
        press_t = events[i].t;
        break;
      }
    }
    cutoff = pre_movement_start(events, press_index, press_t, cfg.idle_gap);
  } else {
    cutoff = events[span.first].t;
  }

  // Latest frame at or before the cutoff.
  int latest = -1;
  for (std::size_t k = 0; k < frames.size(); ++k)
    if (frames[k].t <= cutoff) latest = int(k);
  if (latest < 0)
    throw CuaError(Err::alignment_error,
                   "no frame precedes the action at t=" + std::to_string(cutoff));
  if (!backtrack) return latest;

  // Last visually distinct frame: content changed from its predecessor.
  for (int k = latest; k >= 1; --k) {
    if (cache.distance(std::size_t(k - 1), std::size_t(k)) > cfg.diff_threshold)
      return k;
  }
  return latest;  // static screen: fall back to the latest candidate
}

}  // namespace

double visual_distance(const Frame& a, const Frame& b, const AlignerConfig& cfg,
                       const std::filesystem::path& demo_dir) {
  img::Image ia = img::load_image(demo_dir / a.file);
  img::Image ib = img::load_image(demo_dir / b.file);
  return img::mean_abs_diff(ia, ib, cfg.downsample_width, cfg.downsample_height);
}

int select_keyframe(const std::vector<Frame>& frames, const AgentAction& action,
                    reduce::Span span, const std::vector<RawEvent>& events,
                    const AlignerConfig& cfg,
                    const std::filesystem::path& demo_dir) {
  check_config(cfg);
  FrameCache cache(frames, cfg, demo_dir);
  return select_with_cache(frames, action, span, events, cfg, cache);
}

core::Trajectory build_trajectory(const core::RawDemonstration& demo,
                                  const std::vector<reduce::ReducedAction>& reduced,
                                  const AlignerConfig& cfg,
                                  const std::filesystem::path& demo_dir) {
  check_config(cfg);
  if (reduced.empty())
    throw CuaError(Err::alignment_error, "no reduced actions to align");

  core::Trajectory traj;
  traj.instruction = demo.instruction;
  traj.os = demo.os;
  traj.resolution = demo.resolution;
  traj.status = demo.status;
  {
    std::ostringstream note;
    note << "aligner idle_gap=" << cfg.idle_gap
         << " diff_threshold=" << cfg.diff_threshold << " downsample="
         << cfg.downsample_width << "x" << cfg.downsample_height;
    traj.config_note = note.str();
  }

  FrameCache cache(demo.frames, cfg, demo_dir);
  std::vector<int> keyframes(reduced.size());
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    try {
      keyframes[i] = select_with_cache(demo.frames, reduced[i].action,
                                       reduced[i].span, demo.events, cfg, cache);
    } catch (const CuaError& e) {
      throw CuaError(e.code(), "step " + std::to_string(i) + ": " + e.what());
    }
  }
  // Keyframes must strictly increase. Conflicts (an approach moveTo shares
  // its click's pre-movement cutoff, or a static screen repeats a frame)
  // resolve by pushing the earlier step back, never a later one forward, so
  // no step ever sees a frame past its own cutoff.
  for (std::size_t i = reduced.size(); i-- > 1;) {
    if (keyframes[i - 1] >= keyframes[i]) keyframes[i - 1] = keyframes[i] - 1;
  }
  if (!keyframes.empty() && keyframes[0] < 0)
    throw CuaError(Err::alignment_error,
                   "not enough distinct frames to keep keyframes increasing");
  int floor_index = -1;
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    core::Step step;
    step.frame_index = keyframes[i];
    step.frame_file = demo.frames[std::size_t(keyframes[i])].file;
    step.action = reduced[i].action;
    step.span = reduced[i].span;
    traj.steps.push_back(std::move(step));
    floor_index = keyframes[i];
  }

  // Terminal state: the last frame after the final action; when the
  // recording ends on the action itself the final frame is reused.
  core::Step terminal;
  terminal.frame_index = int(demo.frames.size()) - 1;
  terminal.frame_file = demo.frames.back().file;
  terminal.action = core::Terminate{demo.status};
  terminal.span = {demo.events.size(), demo.events.size()};
  if (terminal.frame_index < floor_index)
    throw CuaError(Err::alignment_error, "terminal frame precedes the last keyframe");
  traj.steps.push_back(std::move(terminal));

  return traj;
}

}  // namespace cua::align
