#ifndef OGAN_CHECKPOINT_HPP
#define OGAN_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ogan/tensor.hpp"

namespace ogan {

/// Serializable training snapshot: named tensors (parameters and optimizer
/// accumulators), the rng state and a JSON config snapshot. Layout:
/// magic "OGAN", u32 version, u64 iteration, u32 tensor count, per tensor
/// {u16 name length, name, u8 ndim, u32 dims..., f32 data...}, rng state
/// (2 x u64), u32 config length, config bytes. Little-endian throughout.
struct Checkpoint {
  std::uint64_t iteration = 0;
  std::vector<std::pair<std::string, Tensor>> tensors;
  std::uint64_t rng_key = 0;
  std::uint64_t rng_counter = 0;
  std::string config_json;

  const Tensor* find(const std::string& name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Atomic write (temp file + rename).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Structured IoError on bad magic, unsupported version or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ogan

#endif  // OGAN_CHECKPOINT_HPP
