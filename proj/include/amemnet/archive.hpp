#pragma once

#include <filesystem>

#include "amemnet/model.hpp"

namespace amemnet {

// Model persistence: `model.meta` (UTF-8 key-value header plus one tensor
// index line per tensor: name, dims, byte offset) and `model.bin` (the
// concatenated little-endian f32 payload). Saving quantizes parameters to
// 32 bits; loading promotes back to f64, so save/load is idempotent.
void save_model(const Model& model, const std::filesystem::path& dir);
Model load_model(const std::filesystem::path& dir);

// Round one model through the f32 representation in memory.
Model quantize_f32(const Model& model);

}  // namespace amemnet
