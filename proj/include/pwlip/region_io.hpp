#pragma once

#include "pwlip/polyhedron.hpp"

#include <filesystem>
#include <string_view>

namespace pwlip {

/// Region documents are one of
///   {"dim": d, "C": [[...]], "c": [...]}
///   {"box": {"lower": [...], "upper": [...]}}   (null entries mean unbounded)
///   {"global": d}
/// Throws ErrorKind::Parse on malformed input.
Polyhedron parse_region(std::string_view json_text);
Polyhedron load_region(const std::filesystem::path& path);

}  // namespace pwlip
