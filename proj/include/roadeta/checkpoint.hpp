#pragma once

#include <map>
#include <string>

#include "roadeta/array.hpp"

namespace roadeta::ad {

// Named parameter arrays. std::map keeps iteration sorted by name, which the
// checkpoint format and the optimizer both rely on for reproducibility.
using ParamSet = std::map<std::string, Array>;

// Checkpoint container: magic "RECK", version, entry count, then entries
// sorted by name. Each entry: name, dtype (f64 or f32), dims, raw
// little-endian payload. Compute is always f64; f32 payloads are widened on
// load.
void save_checkpoint(const std::string& path, const ParamSet& params, bool as_f32 = false);
ParamSet load_checkpoint(const std::string& path);

}  // namespace roadeta::ad
