#pragma once

#include <string>
#include <vector>

namespace genlink {

/// A finite set of string values. Kept sorted and duplicate-free so set
/// semantics and deterministic iteration come for free.
using ValueSet = std::vector<std::string>;

/// Sorts and deduplicates in place.
void normalize(ValueSet& values);

ValueSet make_value_set(std::vector<std::string> values);

}  // namespace genlink
