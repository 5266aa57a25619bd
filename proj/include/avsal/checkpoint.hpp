#pragma once

#include <filesystem>

#include "avsal/model.hpp"

namespace avsal {

// Binary checkpoint: "DVCK", a version byte, then a 32-bit LE tensor count
// followed by named tensors (LE name length + bytes, rank, dims, 32-bit LE
// float payload). The model configuration rides along as meta.* tensors, so
// a checkpoint alone is enough to rebuild the network.
inline constexpr char kCheckpointMagic[4] = {'D', 'V', 'C', 'K'};
inline constexpr uint8_t kCheckpointVersion = 1;

void save_checkpoint(TwoStreamModel<float>& model, const std::filesystem::path& path);
TwoStreamModel<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace avsal
