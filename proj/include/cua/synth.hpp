#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "cua/action.hpp"
#include "cua/bench.hpp"
#include "cua/types.hpp"

namespace cua::synth {

struct ScriptOptions {
  int min_actions = 4;
  int max_actions = 12;
};

/// Seeded ground-truth action script in canonical reduced form: gestures at
/// a fresh target are preceded by an explicit moveTo, repeats at the current
/// position are bare, writes never adjoin writes, hotkeys always carry a
/// non-shift modifier. No wait/terminate — those never originate from raw
/// input.
std::vector<core::AgentAction> generate_script(std::mt19937_64& rng,
                                               const ScriptOptions& opts = {});

/// Per-action ground truth produced by the lowerer.
struct ActionTruth {
  core::AgentAction action;
  std::int64_t first_t = 0;      // first event timestamp of the gesture
  std::int64_t press_t = 0;      // button_down time for press gestures
  std::int64_t premove_start = 0;  // t0; equals press_t when no approach
  bool press_gesture = false;
};

struct Lowered {
  std::vector<core::RawEvent> events;
  std::vector<ActionTruth> truth;  // one entry per script action
  std::int64_t end_t = 0;
};

/// Expand a script into a raw event stream with jittered move samples and
/// split keystrokes. Reduction must recover the script exactly.
Lowered lower_script(const std::vector<core::AgentAction>& script,
                     std::mt19937_64& rng);

struct DemoOptions {
  ScriptOptions script;
  std::int64_t frame_interval = 100;  // ms
  int frame_width = 64;
  int frame_height = 36;
  double change_probability = 0.85;  // screen change after a gesture
  core::Resolution resolution{1280, 720};
};

struct SynthDemo {
  core::RawDemonstration demo;
  std::vector<core::AgentAction> script;
  std::vector<ActionTruth> truth;
  std::vector<std::int64_t> change_times;  // injected content changes
};

/// Build a demonstration in memory; frame image files are written only by
/// write_demo.
SynthDemo make_demo(std::uint64_t seed, const DemoOptions& opts = {});

/// Write the demonstration directory including frame images.
void write_demo(const SynthDemo& demo, const std::filesystem::path& dir);

/// Seeded corpus of demonstration directories (demo_0000, demo_0001, ...).
std::vector<SynthDemo> write_corpus(const std::filesystem::path& root, int count,
                                    std::uint64_t seed,
                                    const DemoOptions& opts = {});

/// Derive a benchmark task whose gold options accept exactly the script, and
/// the matching perfect response texts.
bench::BenchTask bench_task_from(const SynthDemo& demo, const std::string& id);
std::vector<std::string> perfect_responses(const SynthDemo& demo);

}  // namespace cua::synth
