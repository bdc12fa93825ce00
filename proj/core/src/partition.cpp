#include <cmath>
#include <limits>
#include <string>

#include "semwm/error.hpp"
#include "semwm/partition.hpp"

namespace semwm {

std::string_view to_string(PartitionMode mode) {
  return mode == PartitionMode::kKMeans ? "kmeans" : "lsh";
}

PartitionMode parse_partition_mode(std::string_view text) {
  if (text == "kmeans") return PartitionMode::kKMeans;
  if (text == "lsh") return PartitionMode::kLsh;
  fail(ErrorCode::kConfig, "unknown partition mode '" + std::string(text) + "'");
}

KMeansPartition::KMeansPartition(std::vector<Embedding> centroids, std::uint64_t fit_seed,
                                 double inertia)
    : centroids_(std::move(centroids)), fit_seed_(fit_seed), inertia_(inertia) {
  if (centroids_.size() < 2) fail(ErrorCode::kConfig, "k-means partition needs K >= 2");
  const std::size_t h = centroids_.front().dim();
  if (h < 2) fail(ErrorCode::kConfig, "embedding dimension must be at least 2");
  for (const auto& c : centroids_) {
    if (c.dim() != h) fail(ErrorCode::kDimensionMismatch, "centroid dimensions differ");
  }
  for (std::size_t i = 0; i < centroids_.size(); ++i) {
    for (std::size_t j = i + 1; j < centroids_.size(); ++j) {
      if (cosine_distance(centroids_[i], centroids_[j]) <= 1e-9) {
        fail(ErrorCode::kDegenerateCorpus,
             "centroids " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
  if (!(inertia_ >= 0.0)) fail(ErrorCode::kConfig, "inertia must be non-negative");
}

RegionIndex KMeansPartition::assign(const Embedding& v) const {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < centroids_.size(); ++i) {
    const double d = cosine_distance(v, centroids_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return RegionIndex{best};
}

bool KMeansPartition::margin_ok(const Embedding& v, double m) const {
  const std::uint32_t q = assign(v).value;
  const double dq = cosine_distance(v, centroids_[q]);
  double runner_up = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < centroids_.size(); ++i) {
    if (i == q) continue;
    runner_up = std::min(runner_up, cosine_distance(v, centroids_[i]));
  }
  return dq < runner_up - m;
}

LSHPartition::LSHPartition(std::vector<std::vector<double>> normals, std::uint64_t fit_seed)
    : normals_(std::move(normals)), fit_seed_(fit_seed) {
  if (normals_.empty() || normals_.size() > kMaxHyperplanes) {
    fail(ErrorCode::kConfig, "LSH partition needs 1.." + std::to_string(kMaxHyperplanes) +
                                 " hyperplanes");
  }
  const std::size_t h = normals_.front().size();
  if (h < 2) fail(ErrorCode::kConfig, "embedding dimension must be at least 2");
  norms_.reserve(normals_.size());
  for (const auto& row : normals_) {
    if (row.size() != h) fail(ErrorCode::kDimensionMismatch, "hyperplane dimensions differ");
    double sq = 0.0;
    for (double x : row) {
      if (!std::isfinite(x)) fail(ErrorCode::kFormat, "non-finite hyperplane entry");
      sq += x * x;
    }
    if (!(sq > 0.0)) fail(ErrorCode::kDegenerateCorpus, "hyperplane normal is zero");
    norms_.push_back(std::sqrt(sq));
  }
}

namespace {

double row_dot(const std::vector<double>& row, const Embedding& v) {
  if (row.size() != v.dim()) {
    fail(ErrorCode::kDimensionMismatch, "embedding has dimension " + std::to_string(v.dim()) +
                                            ", partition expects " +
                                            std::to_string(row.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * v[i];
  return s;
}

}  // namespace

RegionIndex LSHPartition::signature(const Embedding& v) const {
  std::uint32_t value = 0;
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (row_dot(normals_[i], v) > 0.0) value |= (1u << i);
  }
  return RegionIndex{value};
}

bool LSHPartition::margin_ok(const Embedding& v, double m) const {
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (!(std::abs(row_dot(normals_[i], v)) / norms_[i] > m)) return false;
  }
  return true;
}

PartitionMode mode_of(const Partition& p) {
  return std::holds_alternative<KMeansPartition>(p) ? PartitionMode::kKMeans
                                                    : PartitionMode::kLsh;
}

std::uint32_t region_count(const Partition& p) {
  return std::visit([](const auto& part) { return part.region_count(); }, p);
}

std::size_t dim_of(const Partition& p) {
  return std::visit([](const auto& part) { return part.dim(); }, p);
}

RegionIndex region_of(const Partition& p, const Embedding& v) {
  if (const auto* km = std::get_if<KMeansPartition>(&p)) return km->assign(v);
  return std::get<LSHPartition>(p).signature(v);
}

bool margin_ok(const Partition& p, const Embedding& v, double m) {
  return std::visit([&](const auto& part) { return part.margin_ok(v, m); }, p);
}

}  // namespace semwm
