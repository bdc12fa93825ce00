#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "semwm/error.hpp"
#include "semwm/partition.hpp"
#include "semwm/rng.hpp"

namespace semwm {

namespace {

// Distances this small are treated as coincident points.
constexpr double kCoincident = 1e-12;

struct Assignment {
  std::vector<RegionIndex> labels;
  std::vector<double> distances;
  double inertia = 0.0;
};

Assignment assign_all(std::span<const Embedding> points, const std::vector<Embedding>& centroids) {
  Assignment a;
  a.labels.resize(points.size());
  a.distances.resize(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < centroids.size(); ++c) {
      const double d = cosine_distance(points[p], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    a.labels[p] = RegionIndex{best};
    a.distances[p] = std::max(0.0, best_d);
    a.inertia += a.distances[p];
  }
  return a;
}

std::vector<Embedding> seed_plus_plus(std::span<const Embedding> points, std::size_t k,
                                      Xoshiro256& rng) {
  std::vector<Embedding> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      double d = cosine_distance(points[p], centroids.back());
      if (d < kCoincident) d = 0.0;
      nearest[p] = std::min(nearest[p], d);
      total += nearest[p] * nearest[p];
    }
    if (!(total > 0.0)) {
      fail(ErrorCode::kDegenerateCorpus,
           "corpus has fewer than " + std::to_string(k) + " distinct embeddings");
    }
    const double target = rng.uniform01() * total;
    double cumulative = 0.0;
    std::size_t chosen = points.size();
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double w = nearest[p] * nearest[p];
      if (w <= 0.0) continue;
      cumulative += w;
      chosen = p;
      if (cumulative > target) break;
    }
    centroids.push_back(points[chosen]);
  }
  return centroids;
}

struct Run {
  std::vector<Embedding> centroids;
  Assignment final_assignment;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

Run lloyd(std::span<const Embedding> points, std::vector<Embedding> centroids,
          const KMeansOptions& options) {
  const std::size_t k = centroids.size();
  const std::size_t h = points.front().dim();
  Run run;
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    Assignment a = assign_all(points, centroids);
    run.trace.push_back(a.inertia);
    run.iterations = iter;

    std::vector<std::vector<double>> sums(k, std::vector<double>(h, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto c = a.labels[p].value;
      ++counts[c];
      const auto vals = points[p].values();
      for (std::size_t j = 0; j < h; ++j) sums[c][j] += vals[j];
    }

    std::vector<std::optional<Embedding>> updated(k);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double sq = 0.0;
      for (double x : sums[c]) sq += x * x;
      if (std::sqrt(sq) > kCoincident) updated[c] = Embedding::normalize(sums[c]);
    }

    // Empty clusters take the point farthest from its own centroid.
    std::vector<bool> used(points.size(), false);
    for (std::size_t c = 0; c < k; ++c) {
      if (updated[c]) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        if (!used[p] && a.distances[p] > far_d) {
          far_d = a.distances[p];
          far = p;
        }
      }
      used[far] = true;
      updated[c] = points[far];
    }

    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      movement = std::max(movement, cosine_distance(centroids[c], *updated[c]));
      centroids[c] = std::move(*updated[c]);
    }
    if (movement < options.tol) {
      run.converged = true;
      break;
    }
  }
  run.final_assignment = assign_all(points, centroids);
  run.trace.push_back(run.final_assignment.inertia);
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansFit fit_kmeans(std::span<const Embedding> points, const KMeansOptions& options) {
  if (options.k < 2) fail(ErrorCode::kConfig, "k-means needs K >= 2");
  if (options.max_iters < 1) fail(ErrorCode::kConfig, "max_iters must be positive");
  if (options.restarts < 1) fail(ErrorCode::kConfig, "restarts must be positive");
  if (points.size() < options.k) {
    fail(ErrorCode::kInsufficientData, "k-means needs at least " + std::to_string(options.k) +
                                           " points, got " + std::to_string(points.size()));
  }
  const std::size_t h = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != h) fail(ErrorCode::kDimensionMismatch, "corpus embeddings differ in dimension");
  }

  std::optional<Run> best;
  for (int r = 0; r < options.restarts; ++r) {
    Xoshiro256 rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    Run run = lloyd(points, seed_plus_plus(points, options.k, rng), options);
    if (!best || run.final_assignment.inertia < best->final_assignment.inertia) {
      best = std::move(run);
    }
  }

  KMeansPartition partition(std::move(best->centroids), options.seed,
                            best->final_assignment.inertia);
  return KMeansFit{std::move(partition), std::move(best->final_assignment.labels),
                   std::move(best->trace), best->iterations, best->converged};
}

}  // namespace semwm
