#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semwm/embedding.hpp"
#include "semwm/generation.hpp"
#include "semwm/partition.hpp"
#include "semwm/rng.hpp"

namespace semwm::testing {

Embedding random_unit(std::size_t dim, Xoshiro256& rng);

/// normalize(v + noise * N(0, I)).
Embedding perturb(const Embedding& v, double noise, Xoshiro256& rng);

/// Points scattered around k random unit centers.
struct ClusterFixture {
  std::vector<Embedding> centers;
  std::vector<Embedding> points;
  std::vector<std::size_t> labels;
};

ClusterFixture make_clusters(std::size_t k, std::size_t per_cluster, std::size_t dim,
                             double noise, std::uint64_t seed);

/// Toy sentences on uniformly drawn topics, with their topic labels.
struct ToyCorpus {
  std::vector<std::string> sentences;
  std::vector<std::size_t> topics;
};

ToyCorpus make_toy_corpus(std::size_t n, std::uint64_t seed);

/// The clustered fixture: toy embedder, toy LM, a k-means partition fitted
/// on a toy corpus and an LSH partition over the same space.
struct ToyWorld {
  ToyEmbedder embedder;
  KMeansPartition kmeans;
  LSHPartition lsh;
  std::uint64_t seed = 0;
};

ToyWorld make_toy_world(std::uint64_t seed, std::size_t k = 8, std::size_t d = 3,
                        std::size_t corpus_size = 4000, int restarts = 4);

/// Text "r<i> ..." embeds onto axis i of a dim-dimensional space. With the
/// token "edge" the vector sits near the boundary with axis i+1: it still
/// assigns to i but fails any margin above 0.001. Text without an r-token is
/// unembeddable.
class AxisEmbedder final : public Embedder {
 public:
  explicit AxisEmbedder(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "axis"; }
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;

 private:
  std::size_t dim_;
};

/// K-means partition whose centroids are the coordinate axes.
KMeansPartition axis_partition(std::size_t k);

/// Candidates "r<i> s<step> t<try>." with i uniform over `regions`, drawn from
/// (seed, context size, try) only; "edge" is appended with probability
/// edge_rate.
class AxisGenerator final : public SentenceGenerator {
 public:
  AxisGenerator(std::uint32_t regions, std::uint64_t seed, double edge_rate = 0.0)
      : regions_(regions), seed_(seed), edge_rate_(edge_rate) {}
  std::string next_sentence(std::span<const std::string> context, int try_index) override;

 private:
  std::uint32_t regions_;
  std::uint64_t seed_;
  double edge_rate_;
};

}  // namespace semwm::testing
