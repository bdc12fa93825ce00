#include <benchmark/benchmark.h>

#include "semwm/detection.hpp"
#include "semwm/embedding.hpp"
#include "semwm/generation.hpp"
#include "semwm/partition.hpp"
#include "semwm/rng.hpp"
#include "semwm/toy_vocab.hpp"

namespace {

using namespace semwm;

std::vector<std::string> corpus(std::size_t n) {
  Xoshiro256 rng(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(ToyLanguageModel::sentence_on_topic(rng.below(toy_topics().size()), rng.next()));
  }
  return out;
}

const KMeansPartition& fitted() {
  static const KMeansPartition p = [] {
    KMeansOptions o;
    o.seed = 7;
    return fit_kmeans(ToyEmbedder{}.embed_batch(corpus(4000)), o).partition;
  }();
  return p;
}

void BM_ToyEmbed(benchmark::State& state) {
  const std::string s = "The stormy sailor steered the anchor near the harbor.";
  for (auto _ : state) benchmark::DoNotOptimize(toy_embed(s, kDefaultToyDim, 0));
}
BENCHMARK(BM_ToyEmbed);

void BM_Assign(benchmark::State& state) {
  const auto& p = fitted();
  const auto v = toy_embed("The cosmic rocket orbited the nebula.", kDefaultToyDim, 0);
  for (auto _ : state) benchmark::DoNotOptimize(p.assign(v));
}
BENCHMARK(BM_Assign);

void BM_SelectValidRegions(benchmark::State& state) {
  const auto regions = static_cast<std::uint32_t>(state.range(0));
  std::uint32_t prev = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_valid_regions(RegionIndex{prev}, kDefaultPrime, regions, 0.25));
    prev = (prev + 1) % regions;
  }
}
BENCHMARK(BM_SelectValidRegions)->Arg(8)->Arg(64)->Arg(1024);

void BM_FitKMeans(benchmark::State& state) {
  const auto points = ToyEmbedder{}.embed_batch(corpus(static_cast<std::size_t>(state.range(0))));
  KMeansOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(fit_kmeans(points, o).iterations);
}
BENCHMARK(BM_FitKMeans)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_GenerateDocument(benchmark::State& state) {
  const Partition p{fitted()};
  const ToyEmbedder embedder;
  ToyLanguageModel lm({3, 1.0});
  const WatermarkConfig config;
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_watermarked(lm, embedder, p, config, lm.prompt(i++), 20));
  }
}
BENCHMARK(BM_GenerateDocument)->Unit(benchmark::kMicrosecond);

void BM_DetectDocument(benchmark::State& state) {
  const Partition p{fitted()};
  const ToyEmbedder embedder;
  ToyLanguageModel lm({3, 1.0});
  const WatermarkConfig config;
  const std::string doc = generate_watermarked(lm, embedder, p, config, lm.prompt(0), 20).document();
  for (auto _ : state) benchmark::DoNotOptimize(detect(doc, embedder, p, config).z);
}
BENCHMARK(BM_DetectDocument)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
