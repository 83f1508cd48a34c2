#pragma once

#include <cstddef>
#include <string>

#include "hasqa/config.hpp"
#include "hasqa/model.hpp"
#include "hasqa/rng.hpp"

namespace hasqa {

/// On-disk layout:
///   8 bytes   magic "HASQACK1"
///   8 bytes   manifest length L, little-endian u64
///   L bytes   manifest JSON: format_version, config, vocab, epoch, rng,
///             tensors [{name, role, shape, dtype}]
///   payload   the tensors' f64 values, little-endian, in manifest order
/// Roles are "value", "mean_sq_grad" and "mean_sq_delta" (optimizer state).
struct Checkpoint {
  RunConfig config;
  Model model;
  std::size_t epoch = 0;
  Rng rng;
};

inline constexpr int kCheckpointFormatVersion = 1;

void saveCheckpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint loadCheckpoint(const std::string& path);

}  // namespace hasqa
