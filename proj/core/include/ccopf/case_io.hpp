#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ccopf/grid_case.hpp"

namespace ccopf {

enum class CaseFormat { Canonical, MatpowerSubset };

// Parses case text, merges co-located generators, validates. Throws a
// Parse error with a line number on malformed text and a Validation error
// naming the violated invariant otherwise.
GridCase parse_case(std::string_view text, CaseFormat format);

// Canonical key-value document; parse(serialize(gc)) == gc.
std::string serialize_case(const GridCase& gc);

// Reads a file, picking the format from the extension (.m -> MATPOWER
// subset, anything else canonical).
GridCase load_case(const std::filesystem::path& path);

}  // namespace ccopf
