#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "l2b/value_net.hpp"

namespace l2b::nn {

/// Training progress stored alongside the weights.
struct CheckpointMeta {
  std::uint64_t episode = 0;
  std::uint64_t updates = 0;
};

struct Checkpoint {
  NetParams params;
  CheckpointMeta meta;
};

/// Binary layout (little-endian):
///   "L2BVNET1" | u32 version | u32 n_blocks, per block u32 n, u32 widths[n]
///   | u64 adam_step | u64 episode | u64 updates | u64 n_params
///   | f64 values[n] | f64 adam_m[n] | f64 adam_v[n] | u64 FNV-1a of all prior bytes
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize(const Checkpoint& checkpoint);

/// Throws CheckpointError on bad magic, version, checksum, or truncation. If
/// `expected` is given, a differing architecture is reported tensor by tensor.
Checkpoint deserialize(const std::string& bytes, const std::optional<NetConfig>& expected = {});

/// Writes through a temporary file and rename, so readers never observe a
/// partial checkpoint.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<NetConfig>& expected = {});

}  // namespace l2b::nn
