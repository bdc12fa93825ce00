#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "semwm/embedding.hpp"

namespace semwm {

/// Index of one cell of a semantic-space partition.
struct RegionIndex {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(RegionIndex, RegionIndex) = default;
};

enum class PartitionMode { kKMeans, kLsh };

std::string_view to_string(PartitionMode mode);
PartitionMode parse_partition_mode(std::string_view text);

/// K unit-norm, pairwise-distinct centroids; region i is the set of vectors
/// whose nearest centroid (cosine) is row i.
class KMeansPartition {
 public:
  KMeansPartition(std::vector<Embedding> centroids, std::uint64_t fit_seed,
                  double inertia = 0.0);

  std::size_t k() const noexcept { return centroids_.size(); }
  std::size_t dim() const noexcept { return centroids_.front().dim(); }
  std::uint32_t region_count() const noexcept {
    return static_cast<std::uint32_t>(centroids_.size());
  }
  const std::vector<Embedding>& centroids() const noexcept { return centroids_; }
  std::uint64_t fit_seed() const noexcept { return fit_seed_; }
  double inertia() const noexcept { return inertia_; }

  /// Nearest centroid by cosine distance; ties go to the lowest index.
  RegionIndex assign(const Embedding& v) const;

  /// d(v, c_q) < min_{i != q} d(v, c_i) - m, strictly.
  bool margin_ok(const Embedding& v, double m) const;

 private:
  std::vector<Embedding> centroids_;
  std::uint64_t fit_seed_;
  double inertia_;
};

/// d random hyperplanes through the origin; 2^d regions. Bit i of the
/// signature is 1 iff normal_i . v > 0, and carries weight 2^i.
class LSHPartition {
 public:
  static constexpr std::size_t kMaxHyperplanes = 20;

  LSHPartition(std::vector<std::vector<double>> normals, std::uint64_t fit_seed);

  std::size_t d() const noexcept { return normals_.size(); }
  std::size_t dim() const noexcept { return normals_.front().size(); }
  std::uint32_t region_count() const noexcept { return 1u << normals_.size(); }
  const std::vector<std::vector<double>>& normals() const noexcept { return normals_; }
  std::uint64_t fit_seed() const noexcept { return fit_seed_; }

  RegionIndex signature(const Embedding& v) const;

  /// |n_i . v| / |n_i| > m for every hyperplane.
  bool margin_ok(const Embedding& v, double m) const;

 private:
  std::vector<std::vector<double>> normals_;
  std::vector<double> norms_;
  std::uint64_t fit_seed_;
};

using Partition = std::variant<KMeansPartition, LSHPartition>;

PartitionMode mode_of(const Partition& p);
std::uint32_t region_count(const Partition& p);
std::size_t dim_of(const Partition& p);
RegionIndex region_of(const Partition& p, const Embedding& v);
bool margin_ok(const Partition& p, const Embedding& v, double m);

// ---------------------------------------------------------------------------
// Fitting

struct KMeansOptions {
  std::size_t k = 8;
  std::uint64_t seed = 0;
  int max_iters = 100;
  /// Stop once no centroid moves more than this (cosine distance).
  double tol = 1e-6;
  /// Independent k-means++ restarts; the lowest final inertia wins, earliest
  /// restart on ties.
  int restarts = 1;
};

struct KMeansFit {
  KMeansPartition partition;
  std::vector<RegionIndex> assignment;  // final, one per input point
  std::vector<double> inertia_trace;    // after each assignment step
  int iterations = 0;
  bool converged = false;
};

/// Spherical k-means: k-means++ seeding on cosine distance, Lloyd iterations
/// with cosine assignment and normalized-mean updates. An empty cluster is
/// moved onto the point farthest from its current centroid.
///
/// Throws kInsufficientData when there are fewer points than k and
/// kDegenerateCorpus when fewer than k distinct points exist.
KMeansFit fit_kmeans(std::span<const Embedding> points, const KMeansOptions& options);

/// d x h standard normal matrix drawn from Xoshiro256(seed), row-major.
LSHPartition fit_lsh(std::size_t d, std::size_t h, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Persistence
//
// {"version":1, "type":"kmeans"|"lsh", "dim":h, "k":K | "d":d,
//  "rows":[[...],...], "fit_seed":s}
// Doubles are written with 17 significant digits so round trips are exact.

inline constexpr int kPartitionFormatVersion = 1;

std::string partition_to_json(const Partition& p);
Partition partition_from_json(std::string_view text);

void save_partition(const Partition& p, const std::filesystem::path& path);
Partition load_partition(const std::filesystem::path& path);

}  // namespace semwm
