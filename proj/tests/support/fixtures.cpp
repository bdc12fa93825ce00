#include "fixtures.hpp"

#include <optional>

#include "semwm/error.hpp"
#include "semwm/generation.hpp"
#include "semwm/text.hpp"
#include "semwm/toy_vocab.hpp"

namespace semwm::testing {

Embedding random_unit(std::size_t dim, Xoshiro256& rng) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return Embedding::normalize(v);
}

Embedding perturb(const Embedding& v, double noise, Xoshiro256& rng) {
  std::vector<double> out(v.values().begin(), v.values().end());
  for (auto& x : out) x += noise * rng.normal();
  return Embedding::normalize(out);
}

ClusterFixture make_clusters(std::size_t k, std::size_t per_cluster, std::size_t dim,
                             double noise, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  ClusterFixture f;
  for (std::size_t c = 0; c < k; ++c) f.centers.push_back(random_unit(dim, rng));
  for (std::size_t i = 0; i < per_cluster; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      f.points.push_back(perturb(f.centers[c], noise, rng));
      f.labels.push_back(c);
    }
  }
  return f;
}

ToyCorpus make_toy_corpus(std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  ToyCorpus c;
  const std::size_t topics = toy_topics().size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = rng.below(topics);
    c.topics.push_back(t);
    c.sentences.push_back(ToyLanguageModel::sentence_on_topic(t, rng.next()));
  }
  return c;
}

ToyWorld make_toy_world(std::uint64_t seed, std::size_t k, std::size_t d,
                        std::size_t corpus_size, int restarts) {
  ToyEmbedder embedder;
  const ToyCorpus corpus = make_toy_corpus(corpus_size, derive_seed(seed, "corpus"));
  KMeansOptions options;
  options.k = k;
  options.seed = derive_seed(seed, "kmeans");
  options.restarts = restarts;
  KMeansFit fit = fit_kmeans(embedder.embed_batch(corpus.sentences), options);
  return ToyWorld{embedder, std::move(fit.partition),
                  fit_lsh(d, embedder.dim(), derive_seed(seed, "lsh")), seed};
}

std::vector<Embedding> AxisEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    const auto tokens = tokenize(text);
    std::optional<std::size_t> axis;
    bool edge = false;
    for (const auto& t : tokens) {
      if (t == "edge") edge = true;
      if (!axis && t.size() > 1 && t[0] == 'r' &&
          t.find_first_not_of("0123456789", 1) == std::string::npos) {
        axis = std::stoul(t.substr(1)) % dim_;
      }
    }
    if (!axis) fail(ErrorCode::kDegenerateEmbedding, "no region token in '" + text + "'");
    std::vector<double> v(dim_, 0.0);
    v[*axis] = 1.0;
    if (edge) v[(*axis + 1) % dim_] = 0.9995;
    out.push_back(Embedding::normalize(v));
  }
  return out;
}

KMeansPartition axis_partition(std::size_t k) {
  std::vector<Embedding> centroids;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> v(k, 0.0);
    v[i] = 1.0;
    centroids.push_back(Embedding::from_unit(v));
  }
  return KMeansPartition(std::move(centroids), 0);
}

std::string AxisGenerator::next_sentence(std::span<const std::string> context, int try_index) {
  Xoshiro256 rng(derive_seed(derive_seed(seed_, context.size()), std::uint64_t(try_index)));
  const auto region = rng.below(regions_);
  std::string s = "r" + std::to_string(region) + " s" + std::to_string(context.size()) + " t" +
                  std::to_string(try_index);
  if (rng.uniform01() < edge_rate_) s += " edge";
  return s + ".";
}

}  // namespace semwm::testing
