#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cua/action.hpp"
#include "cua/keys.hpp"
#include "cua/util.hpp"

namespace cua::test {

inline std::int64_t rint(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + std::int64_t(rng() % std::uint64_t(hi - lo + 1));
}

inline double rcoord(std::mt19937_64& rng) {
  return quantize_coord(double(rint(rng, 0, 10000)) / 10000.0);
}

/// Random well-formed action over the whole space, terminate/wait included.
inline core::AgentAction random_action(std::mt19937_64& rng) {
  using namespace core;
  auto button = [&] {
    return rint(rng, 0, 1) ? MouseButton::left : MouseButton::right;
  };
  auto any_button = [&] {
    switch (rint(rng, 0, 2)) {
      case 0: return MouseButton::left;
      case 1: return MouseButton::right;
      default: return MouseButton::middle;
    }
  };
  auto text = [&] {
    static const char chars[] =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 "
        ".,!?'\"\\:;()[]{}<>-_=+*/#@$%^&~`|";
    std::string out;
    int n = int(rint(rng, 1, 24));
    for (int i = 0; i < n; ++i) out += chars[rint(rng, 0, sizeof(chars) - 2)];
    return out;
  };
  auto pos = [&]() -> std::optional<Point> {
    if (rint(rng, 0, 1)) return Point{rcoord(rng), rcoord(rng)};
    return std::nullopt;
  };
  static const char* named_keys[] = {"enter", "esc", "tab", "backspace",
                                     "delete", "home", "end", "pageup",
                                     "pagedown", "up", "down", "left",
                                     "right", "f1", "f12", "space", "a", "z", "7"};
  auto key = [&] { return std::string(named_keys[rint(rng, 0, std::size(named_keys) - 1)]); };

  switch (rint(rng, 0, 12)) {
    case 0: return Click{rcoord(rng), rcoord(rng), button()};
    case 1: return MiddleClick{rcoord(rng), rcoord(rng)};
    case 2: return DoubleClick{rcoord(rng), rcoord(rng), any_button()};
    case 3: return TripleClick{rcoord(rng), rcoord(rng), any_button()};
    case 4: return MoveTo{rcoord(rng), rcoord(rng)};
    case 5: return DragTo{rcoord(rng), rcoord(rng)};
    case 6: {
      int dy = int(rint(rng, 1, 20)) * (rint(rng, 0, 1) ? 1 : -1);
      return Scroll{0, dy, pos()};
    }
    case 7: {
      int dx = int(rint(rng, 1, 20)) * (rint(rng, 0, 1) ? 1 : -1);
      return HScroll{dx, 0, pos()};
    }
    case 8: return Write{text()};
    case 9: return Press{key()};
    case 10: {
      std::vector<std::string> combo;
      static const char* mods[] = {"ctrl", "alt", "shift", "cmd", "win"};
      int n_mods = int(rint(rng, 1, 2));
      for (int i = 0; i < n_mods; ++i) combo.push_back(mods[rint(rng, 0, 4)]);
      combo.push_back(key());
      return Hotkey{keys::canonical_hotkey(combo)};
    }
    case 11: return Wait{};
    default:
      return Terminate{rint(rng, 0, 1) ? TaskStatus::success : TaskStatus::failure};
  }
}

/// Unique scratch directory under the system temp root, removed on
/// destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cua_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cua::test
