#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nashq/neural.hpp"

namespace nashq {

/// The three trained networks of a Nash Q-Network run.
struct ModelSet {
  neural::NetworkParams policy_blue;
  neural::NetworkParams policy_red;
  neural::NetworkParams critic;
};

/// JSON document mapping "<net>.layer<i>.<weight|bias>[.adam_m|.adam_v]" to
/// {"shape": [rows, cols], "data": [row-major values]} plus per-network step
/// counts. Doubles round-trip bit-exactly.
std::string serialize_checkpoint(const ModelSet& models);

/// Inverse of serialize_checkpoint. Throws std::runtime_error on malformed
/// documents or inconsistent shapes.
ModelSet parse_checkpoint(std::string_view text);

/// Atomic write (temp file + rename).
void write_checkpoint(const std::filesystem::path& path, const ModelSet& models);
ModelSet read_checkpoint(const std::filesystem::path& path);

}  // namespace nashq
