#ifndef MBT_NN_CHECKPOINT_HPP_
#define MBT_NN_CHECKPOINT_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mbt/nn/adam.hpp"
#include "mbt/nn/normalizer.hpp"
#include "mbt/nn/policy.hpp"

namespace mbt::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Named float64 tensors plus a JSON metadata block.
struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Matrix>> tensors;

  void Put(const std::string& name, const Matrix& value);
  bool Has(const std::string& name) const;
  // Throws ConfigError if missing.
  const Matrix& Get(const std::string& name) const;
};

// Layout: "MBTCKPT\0", u32 version, u64 json length, json, u32 tensor count,
// then per tensor u32 name length, name, i64 rows, i64 cols, column-major
// doubles. Written through a temporary file and renamed into place.
void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

void StorePolicy(Checkpoint& ckpt, const PolicyNet& net);
// Throws ConfigError when a tensor is missing or has the wrong shape.
void RestorePolicy(const Checkpoint& ckpt, PolicyNet& net);
void StoreOptimizer(Checkpoint& ckpt, const Adam& adam);
void RestoreOptimizer(const Checkpoint& ckpt, Adam& adam);
void StoreNormalizer(Checkpoint& ckpt, const RunningNormalizer& norm);
void RestoreNormalizer(const Checkpoint& ckpt, RunningNormalizer& norm);

}  // namespace mbt::nn

#endif  // MBT_NN_CHECKPOINT_HPP_
