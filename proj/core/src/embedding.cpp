#include "semwm/embedding.hpp"

#include <cmath>
#include <string>

#include "semwm/error.hpp"
#include "semwm/rng.hpp"
#include "semwm/text.hpp"

namespace semwm {

Embedding Embedding::normalize(std::span<const double> raw) {
  if (raw.empty()) fail(ErrorCode::kDegenerateEmbedding, "empty vector");
  double sq = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) fail(ErrorCode::kDegenerateEmbedding, "non-finite component");
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorCode::kDegenerateEmbedding, "zero vector cannot be normalized");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (double& x : out) x /= norm;
  return Embedding(std::move(out));
}

Embedding Embedding::from_unit(std::span<const double> values) {
  double sq = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) fail(ErrorCode::kDegenerateEmbedding, "non-finite component");
    sq += x * x;
  }
  if (values.empty() || std::abs(std::sqrt(sq) - 1.0) > kUnitTolerance) {
    fail(ErrorCode::kDegenerateEmbedding, "vector is not unit-norm");
  }
  return Embedding(std::vector<double>(values.begin(), values.end()));
}

double Embedding::dot(const Embedding& other) const {
  if (other.dim() != dim()) {
    fail(ErrorCode::kDimensionMismatch, "embedding dimensions differ: " +
                                            std::to_string(dim()) + " vs " +
                                            std::to_string(other.dim()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

Embedding normalize(std::span<const double> raw) { return Embedding::normalize(raw); }

double cosine_distance(const Embedding& a, const Embedding& b) { return 1.0 - a.dot(b); }

namespace {

void add_feature(std::vector<double>& acc, std::string_view key, std::uint64_t seed,
                 double weight) {
  const std::uint64_t h = mix64(seed ^ fnv1a64(key));
  const std::size_t bucket = static_cast<std::size_t>(h % acc.size());
  const bool negative = (mix64(h) >> 63) != 0;
  acc[bucket] += negative ? -weight : weight;
}

}  // namespace

Embedding toy_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) fail(ErrorCode::kConfig, "toy embedding dimension must be at least 2");
  const auto tokens = tokenize(text);
  if (tokens.empty()) fail(ErrorCode::kDegenerateEmbedding, "text has no tokens");
  std::vector<double> acc(dim, 0.0);
  std::string key;
  for (const auto& token : tokens) {
    key.assign("w:").append(token);
    add_feature(acc, key, seed, 1.0);
    key.assign("s:").append(token.substr(0, kToyStemLength));
    add_feature(acc, key, seed, kToyStemWeight);
  }
  // Collisions with opposite signs can cancel everything out.
  return Embedding::normalize(acc);
}

Embedding Embedder::embed(const std::string& text) const {
  auto out = embed_batch(std::span<const std::string>(&text, 1));
  return std::move(out.front());
}

ToyEmbedder::ToyEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ < 2) fail(ErrorCode::kConfig, "toy embedding dimension must be at least 2");
}

std::string ToyEmbedder::name() const {
  return "toy(dim=" + std::to_string(dim_) + ",seed=" + std::to_string(seed_) + ")";
}

std::vector<Embedding> ToyEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(toy_embed(t, dim_, seed_));
  return out;
}

}  // namespace semwm
