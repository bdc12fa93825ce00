#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace semwm {

/// Unit-norm sentence embedding. The only way to build one is through
/// normalize(), so every instance satisfies |v| = 1 within rounding and has
/// finite components.
class Embedding {
 public:
  static Embedding normalize(std::span<const double> raw);

  /// Adopts values that are already unit-norm (within kUnitTolerance)
  /// without rescaling them, so stored vectors round-trip bit-exactly.
  static Embedding from_unit(std::span<const double> values);

  static constexpr double kUnitTolerance = 1e-6;

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double dot(const Embedding& other) const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}

  std::vector<double> values_;
};

/// v / |v|_2. Throws kDegenerateEmbedding on zero or non-finite input.
Embedding normalize(std::span<const double> raw);

/// 1 - a.b on unit vectors. Throws kDimensionMismatch.
double cosine_distance(const Embedding& a, const Embedding& b);

inline constexpr std::size_t kDefaultToyDim = 64;

// Toy feature-hashing embedder.
//
// Tokens come from tokenize() (lowercase ASCII alphanumeric runs). Each token
// contributes two signed bumps:
//   word feature  key "w:" + token, weight 1
//   stem feature  key "s:" + first kToyStemLength bytes of the token,
//                 weight kToyStemWeight
// For a key, h = mix64(seed ^ fnv1a64(key)); bucket = h % dim; the sign is
// negative iff the top bit of mix64(h) is set. The bump vector is then
// normalized. Tokens sharing a stem therefore share one of their two buckets.
inline constexpr std::size_t kToyStemLength = 4;
inline constexpr double kToyStemWeight = 2.0;

Embedding toy_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

/// Abstract sentence embedder. Implementations must be deterministic: the
/// same text always maps to the bitwise-same vector.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::size_t dim() const = 0;

  /// Short human-readable description, recorded in report metadata.
  virtual std::string name() const = 0;

  /// Order-preserving; every result is unit-norm with dim() components.
  virtual std::vector<Embedding> embed_batch(
      std::span<const std::string> texts) const = 0;

  Embedding embed(const std::string& text) const;
};

class ToyEmbedder final : public Embedder {
 public:
  explicit ToyEmbedder(std::size_t dim = kDefaultToyDim, std::uint64_t seed = 0);

  std::size_t dim() const override { return dim_; }
  std::string name() const override;
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<Embedding> embed_batch(
      std::span<const std::string> texts) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

}  // namespace semwm
