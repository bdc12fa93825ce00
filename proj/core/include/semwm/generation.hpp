#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semwm/embedding.hpp"
#include "semwm/partition.hpp"

namespace semwm {

inline constexpr std::uint64_t kDefaultPrime = 2147483647ULL;  // 2^31 - 1

/// Everything generation and detection must agree on.
struct WatermarkConfig {
  double gamma = 0.25;
  double margin = 0.035;
  std::uint64_t prime = kDefaultPrime;
  int n_max = 100;
  PartitionMode mode = PartitionMode::kKMeans;

  /// Throws kConfig unless gamma in (0,1), margin >= 0, n_max >= 1, prime is
  /// prime and at least one region is valid out of `region_count`.
  void validate(std::uint32_t region_count) const;
};

bool is_prime(std::uint64_t n);

/// max(1, floor(gamma * R)).
std::uint32_t valid_region_count(std::uint32_t region_count, double gamma);

/// The valid set G for the step after a sentence in `prev`.
///
/// Xoshiro256 is seeded with prev * prime (wrapping 64-bit multiply); a
/// Fisher-Yates shuffle of [0, R) runs from the top (for i = R-1 .. 1, swap i
/// with below(i + 1)); the first valid_region_count(R, gamma) entries form G.
/// Returned sorted ascending.
std::vector<RegionIndex> select_valid_regions(RegionIndex prev, std::uint64_t prime,
                                              std::uint32_t region_count, double gamma);

/// Source of candidate sentences. `context` holds every sentence so far
/// (prompt sentences first); `try_index` counts attempts within one step,
/// starting at 1.
class SentenceGenerator {
 public:
  virtual ~SentenceGenerator() = default;
  virtual std::string next_sentence(std::span<const std::string> context,
                                    int try_index) = 0;
};

enum class RejectionReason { kBlockedRegion, kMargin, kDegenerate };

std::string_view to_string(RejectionReason reason);
RejectionReason parse_rejection_reason(std::string_view text);

struct TraceSentence {
  std::string text;
  RegionIndex region;
  int accepted_on_try = 1;
  bool fallback = false;
};

struct Rejection {
  int step = 0;  // 1-based sentence index
  int try_index = 0;
  RejectionReason reason = RejectionReason::kBlockedRegion;
};

struct GenerationTrace {
  std::string prompt;
  std::vector<TraceSentence> sentences;
  std::vector<Rejection> rejections;
  WatermarkConfig config;

  std::vector<std::string> texts() const;
  /// prompt + " " + generated sentences, the document detection sees.
  std::string document() const;
  std::size_t candidates_drawn() const;
  std::size_t fallback_count() const;
};

/// Valid-region rule; defaults to select_valid_regions with the config's
/// prime and gamma. Exposed so tests can install rigged rules.
using ValidRegionRule = std::function<std::vector<RegionIndex>(RegionIndex prev)>;

ValidRegionRule default_valid_region_rule(const WatermarkConfig& config,
                                          std::uint32_t region_count);

/// Margin-constrained rejection sampling over `partition`.
///
/// The prompt's last sentence seeds step 1. At each step candidates are
/// drawn until one passes the margin test and lands in a valid region. A
/// candidate is classified degenerate (empty or unembeddable), then margin,
/// then blocked-region. After n_max failed tries the last non-degenerate
/// candidate is emitted with fallback = true. Throws kDegenerateGenerator
/// when every try of a step was degenerate.
GenerationTrace generate_watermarked(SentenceGenerator& lm, const Embedder& embedder,
                                     const Partition& partition,
                                     const WatermarkConfig& config,
                                     const std::string& prompt, int num_sentences,
                                     const ValidRegionRule& rule = {});

/// Plain continuation with no watermark: the first candidate of each step.
std::vector<std::string> generate_plain(SentenceGenerator& lm, const std::string& prompt,
                                        int num_sentences);

// ---------------------------------------------------------------------------
// Toy generator

struct ToyLmOptions {
  std::uint64_t seed = 0;
  /// Probability that a sentence re-draws its topic uniformly instead of
  /// staying on the topic of the previous context sentence. 1 means topics
  /// are i.i.d. uniform.
  double spread = 1.0;
};

/// Template sampler over topical word pools (see toy_vocab.hpp). The output
/// is a pure function of (seed, context size, last context sentence,
/// try_index); consecutive tries use different templates and so differ.
class ToyLanguageModel final : public SentenceGenerator {
 public:
  explicit ToyLanguageModel(ToyLmOptions options = {});

  std::string next_sentence(std::span<const std::string> context,
                            int try_index) override;

  /// A sentence on a fixed topic, drawn from `rng_seed`.
  static std::string sentence_on_topic(std::size_t topic, std::uint64_t rng_seed);

  /// A fresh prompt sentence.
  std::string prompt(std::uint64_t index) const;

  const ToyLmOptions& options() const noexcept { return options_; }

 private:
  ToyLmOptions options_;
};

// ---------------------------------------------------------------------------
// Trace serialization: JSON lines. A header line
//   {"kind":"header","doc_id":..,"prompt":..,"config":{..}}
// is followed by one line per step
//   {"kind":"step","doc_id":..,"step":t,"text":..,"region":r,
//    "accepted_on_try":n,"fallback":b,"rejections":[{"try":i,"reason":..},..]}

std::string trace_to_jsonl(const GenerationTrace& trace, const std::string& doc_id);
std::vector<GenerationTrace> traces_from_jsonl(std::string_view text);

}  // namespace semwm
