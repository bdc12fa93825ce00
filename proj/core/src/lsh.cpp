#include "semwm/error.hpp"
#include "semwm/partition.hpp"
#include "semwm/rng.hpp"

namespace semwm {

LSHPartition fit_lsh(std::size_t d, std::size_t h, std::uint64_t seed) {
  if (d < 1) fail(ErrorCode::kConfig, "LSH needs d >= 1");
  if (h < 2) fail(ErrorCode::kConfig, "embedding dimension must be at least 2");
  Xoshiro256 rng(seed);
  std::vector<std::vector<double>> normals(d, std::vector<double>(h));
  for (auto& row : normals) {
    for (double& x : row) x = rng.normal();
  }
  return LSHPartition(std::move(normals), seed);
}

}  // namespace semwm
