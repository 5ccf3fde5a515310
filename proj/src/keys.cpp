#include "cua/keys.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "cua/util.hpp"

namespace cua::keys {

namespace {

const std::unordered_map<std::string, std::string>& synonym_map() {
  static const std::unordered_map<std::string, std::string> map = {
      {"control", "ctrl"},   {"ctl", "ctrl"},      {"lctrl", "ctrl"},
      {"rctrl", "ctrl"},     {"command", "cmd"},   {"meta", "cmd"},
      {"option", "alt"},     {"lalt", "alt"},      {"ralt", "alt"},
      {"super", "win"},      {"windows", "win"},   {"lwin", "win"},
      {"rwin", "win"},       {"return", "enter"},  {"escape", "esc"},
      {"spacebar", "space"}, {"del", "delete"},    {"pgup", "pageup"},
      {"pgdn", "pagedown"},  {"page_up", "pageup"},{"page_down", "pagedown"},
      {"arrowup", "up"},     {"arrowdown", "down"},{"arrowleft", "left"},
      {"arrowright", "right"},{"lshift", "shift"}, {"rshift", "shift"},
      {"back", "backspace"},
  };
  return map;
}

// Shifted variants of the US-layout printable keys.
constexpr std::string_view kBase = "`1234567890-=[]\\;',./";
constexpr std::string_view kShifted = "~!@#$%^&*()_+{}|:\"<>?";

}  // namespace

std::string canonical(std::string_view name) {
  std::string low = to_lower(name);
  if (low == " ") return "space";
  auto it = synonym_map().find(low);
  if (it != synonym_map().end()) return it->second;
  return low;
}

bool is_modifier(std::string_view key) {
  return key == "ctrl" || key == "shift" || key == "alt" || key == "cmd" ||
         key == "win";
}

int modifier_rank(std::string_view key) {
  if (key == "ctrl") return 0;
  if (key == "alt") return 1;
  if (key == "shift") return 2;
  if (key == "cmd") return 3;
  if (key == "win") return 4;
  return 5;
}

bool is_printable(std::string_view key) {
  if (key == "space") return true;
  return key.size() == 1 && key[0] >= 0x21 && key[0] <= 0x7e;
}

char character_for(std::string_view key, bool shift) {
  if (key == "space") return ' ';
  char c = key[0];
  if (!shift) return c;
  if (c >= 'a' && c <= 'z') return char(c - 'a' + 'A');
  auto pos = kBase.find(c);
  if (pos != std::string_view::npos) return kShifted[pos];
  return c;
}

std::vector<std::string> canonical_hotkey(std::vector<std::string> keys) {
  for (auto& k : keys) k = canonical(k);
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    bool ma = is_modifier(a), mb = is_modifier(b);
    if (ma != mb) return ma;
    if (ma && mb) return modifier_rank(a) < modifier_rank(b);
    return false;  // non-modifiers keep source order
  });
  return keys;
}

std::optional<Keystroke> keystroke_for(char c) {
  if (c == ' ') return Keystroke{"space", false};
  if (c >= 'a' && c <= 'z') return Keystroke{std::string(1, c), false};
  if (c >= 'A' && c <= 'Z')
    return Keystroke{std::string(1, char(c - 'A' + 'a')), true};
  if (c >= 0x21 && c <= 0x7e) {
    auto pos = kShifted.find(c);
    if (pos != std::string_view::npos)
      return Keystroke{std::string(1, kBase[pos]), true};
    return Keystroke{std::string(1, c), false};
  }
  return std::nullopt;
}

}  // namespace cua::keys
