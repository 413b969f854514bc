#pragma once

#include "pwlip/network.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace pwlip {

/// Model documents: {"layers": [{"type": "affine", "W": [[...]], "b": [...]},
/// {"type": "relu"}, ...]}. Adjacent affine layers get an identity activation
/// between them, adjacent activations an identity affine map, and a trailing
/// affine layer an identity output activation. Unknown fields are rejected.
Network parse_model(std::string_view json_text);
Network load_model(const std::filesystem::path& path);

/// Inverse of parse_model (round-trips every parameter exactly).
std::string model_to_json(const Network& net);

}  // namespace pwlip
