#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cua::core {

enum class Os { windows, macos, ubuntu };
enum class TaskStatus { success, failure };
enum class Device { mouse, keyboard };
enum class EventKind { move, button_down, button_up, wheel, key_down, key_up };
enum class MouseButton { left, right, middle };

std::string os_name(Os os);
Os os_from_name(const std::string& name);
std::string status_name(TaskStatus s);
TaskStatus status_from_name(const std::string& name);
std::string button_name(MouseButton b);
MouseButton button_from_name(const std::string& name);
std::string event_kind_name(EventKind k);
EventKind event_kind_from_name(const std::string& name);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct WheelDelta {
  int dx = 0;
  int dy = 0;
  bool operator==(const WheelDelta&) const = default;
};

struct Resolution {
  int width = 0;
  int height = 0;
  bool operator==(const Resolution&) const = default;
};

/// One atomic input signal. Timestamps are milliseconds from recording
/// start; positions are normalized to [0,1].
struct RawEvent {
  std::int64_t t = 0;
  Device device = Device::mouse;
  EventKind kind = EventKind::move;
  std::optional<Point> pos;
  std::optional<MouseButton> button;
  std::optional<WheelDelta> wheel;
  std::optional<std::string> key;
};

struct Frame {
  int index = 0;
  std::int64_t t = 0;
  std::string file;  // path relative to the demonstration directory
  int width = 0;
  int height = 0;
};

struct RawDemonstration {
  std::string instruction;
  Os os = Os::ubuntu;
  Resolution resolution;
  TaskStatus status = TaskStatus::success;
  std::int64_t epoch = 0;
  std::vector<RawEvent> events;
  std::vector<Frame> frames;
  std::map<std::int64_t, std::string> axtree_snapshots;
};

enum class Severity { warn, error };

struct Finding {
  Severity severity = Severity::warn;
  std::string code;
  std::string message;
  std::string location;
  bool operator==(const Finding&) const = default;
};

// --- annotation types -------------------------------------------------------

enum class VerdictStatus { correct, incorrect, redundant };
enum class PrivacyLevel { none, low, medium, high };

std::string verdict_status_name(VerdictStatus v);
std::string privacy_name(PrivacyLevel p);
PrivacyLevel privacy_from_name(const std::string& name);

struct ReflectionVerdict {
  VerdictStatus status = VerdictStatus::correct;
  std::string rationale;
  std::optional<std::string> state_change;  // present iff status == correct
  bool operator==(const ReflectionVerdict&) const = default;
};

/// Nested inner-monologue levels: action_description (L1) always present,
/// thought adds L2, observation adds L3.
struct StructuredCoT {
  std::optional<std::string> observation;
  std::optional<std::string> thought;
  std::string action_description;
  bool operator==(const StructuredCoT&) const = default;
};

struct TrajectorySummary {
  std::string refined_instruction;
  int alignment = 0;   // 1..10
  int efficiency = 0;  // 1..10
  int difficulty = 0;  // 1..10
  bool operator==(const TrajectorySummary&) const = default;
};

}  // namespace cua::core
