#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cua::keys {

/// Map a raw key name onto the canonical lowercase vocabulary
/// (control -> ctrl, return -> enter, "A" -> "a", ...). Unknown multi-char
/// names pass through lowercased so exotic keys stay representable.
std::string canonical(std::string_view name);

/// True for ctrl/shift/alt/cmd/win (canonical names).
bool is_modifier(std::string_view key);

/// Canonical modifier sort rank: ctrl < alt < shift < cmd < win.
int modifier_rank(std::string_view key);

/// Single printable character or "space" — the keys a typing run accepts.
bool is_printable(std::string_view key);

/// The character a printable key yields, honoring a held shift
/// ('a' -> 'A', '1' -> '!', space stays ' ').
char character_for(std::string_view key, bool shift);

/// Modifiers sorted canonically first, non-modifiers after in given order.
std::vector<std::string> canonical_hotkey(std::vector<std::string> keys);

/// Canonical key name for one character of write() text; nullopt when the
/// character is not producible by a single (possibly shifted) keystroke.
struct Keystroke {
  std::string key;
  bool shift;
};
std::optional<Keystroke> keystroke_for(char c);

}  // namespace cua::keys
