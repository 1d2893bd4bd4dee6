#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dmrl/nn/param_set.hpp"

namespace dmrl::nn {

// Binary layout (little-endian):
//   magic "DMRLCKPT" | u32 version | u64 schema hash
//   u32 n_meta, then n_meta x (str key, str value)
//   u32 n_tensors, then n_tensors x (str name, u32 rows, u32 cols,
//                                     rows*cols f32 in column-major order)
// where str is u32 length followed by raw bytes.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint64_t schema_hash = 0;
  std::map<std::string, std::string> meta;
  ParamSet<float> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
std::vector<char> serialize_checkpoint(const Checkpoint& ckpt);

// Throws VersionError on bad magic/version or, when expected_schema_hash is
// non-zero, on a schema mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::uint64_t expected_schema_hash = 0);
Checkpoint deserialize_checkpoint(const std::vector<char>& bytes,
                                  std::uint64_t expected_schema_hash = 0);

std::uint64_t file_hash(const std::filesystem::path& path);

}  // namespace dmrl::nn
