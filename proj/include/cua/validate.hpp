#pragma once

#include <vector>

#include "cua/types.hpp"

namespace cua::core {

/// Pure structural validation of a raw demonstration. Returns ordered
/// findings; an empty list means the input is clean. Clipped streams
/// (unmatched button/key downs) are warnings, ordering violations and
/// field mismatches are errors.
std::vector<Finding> validate_demonstration(const RawDemonstration& demo);

bool has_errors(const std::vector<Finding>& findings);

}  // namespace cua::core
