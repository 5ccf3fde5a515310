#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cua/action.hpp"
#include "cua/types.hpp"

namespace cua::dsl {

/// Parse a single action expression (pyautogui-style call or a computer.*
/// function call, optionally fenced). Positional and keyword arguments are
/// both accepted; key names are canonicalized. Integer coordinates > 1 are
/// divided by `resolution` when one is supplied, otherwise rejected.
///
/// Throws CuaError: unsupported_action for unknown call names, parse_error
/// (with byte offset) for malformed syntax, domain_error for out-of-range
/// values.
core::AgentAction parse_action(
    const std::string& text,
    std::optional<core::Resolution> resolution = std::nullopt);

/// Canonical textual form: keyword arguments, 4-decimal coordinates,
/// single-quoted strings. parse_action(render_action(a)) == a.
std::string render_action(const core::AgentAction& action);

enum class Section { observation, thought, action, code };
std::string section_name(Section s);

struct ParsedResponse {
  std::vector<std::pair<Section, std::string>> sections;  // source order
  core::AgentAction action;
  std::string raw;
};

/// Split a full model response into labeled sections, locate the final code
/// payload and parse its last action expression. Throws CuaError(no_action)
/// when no parsable action exists anywhere in the response.
ParsedResponse extract_response(
    const std::string& text,
    std::optional<core::Resolution> resolution = std::nullopt);

}  // namespace cua::dsl
