#pragma once

#include <filesystem>

#include "cua/types.hpp"

namespace cua::core {

// A demonstration directory holds manifest.json, events.jsonl and
// frames.jsonl plus a frames/ image subdirectory. Field names and the
// event wire format are fixed; see docs/formats.md.

RawDemonstration load_demonstration(const std::filesystem::path& dir);
void save_demonstration(const RawDemonstration& demo,
                        const std::filesystem::path& dir);

/// True when the directory looks like a single demonstration (has a
/// manifest), false when it is a corpus root of demonstration subdirs.
bool is_demonstration_dir(const std::filesystem::path& dir);

/// Sorted list of demonstration subdirectories under a corpus root.
std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& root);

}  // namespace cua::core
