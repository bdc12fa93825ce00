#include "semwm/generation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "semwm/error.hpp"
#include "semwm/rng.hpp"
#include "semwm/text.hpp"

namespace semwm {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<detail::u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

// Deterministic Miller-Rabin; these bases are exact for all 64-bit n.
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

void WatermarkConfig::validate(std::uint32_t region_count) const {
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::kConfig, "gamma must lie in (0, 1)");
  if (!(margin >= 0.0) || !std::isfinite(margin)) fail(ErrorCode::kConfig, "margin must be >= 0");
  if (n_max < 1) fail(ErrorCode::kConfig, "n_max must be at least 1");
  if (!is_prime(prime)) fail(ErrorCode::kConfig, std::to_string(prime) + " is not prime");
  if (region_count < 2) fail(ErrorCode::kConfig, "partition must have at least two regions");
  if (std::floor(gamma * region_count) < 1.0) {
    fail(ErrorCode::kConfig, "gamma * R must be at least 1 (gamma=" + std::to_string(gamma) +
                                 ", R=" + std::to_string(region_count) + ")");
  }
}

std::uint32_t valid_region_count(std::uint32_t region_count, double gamma) {
  const double g = std::floor(gamma * static_cast<double>(region_count));
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(g));
}

std::vector<RegionIndex> select_valid_regions(RegionIndex prev, std::uint64_t prime,
                                              std::uint32_t region_count, double gamma) {
  if (prev.value >= region_count) {
    fail(ErrorCode::kConfig, "region " + std::to_string(prev.value) + " out of range");
  }
  Xoshiro256 rng(static_cast<std::uint64_t>(prev.value) * prime);
  std::vector<std::uint32_t> order(region_count);
  std::iota(order.begin(), order.end(), 0u);
  for (std::uint32_t i = region_count - 1; i > 0; --i) {
    const auto j = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  const auto g = valid_region_count(region_count, gamma);
  std::vector<RegionIndex> out;
  out.reserve(g);
  for (std::uint32_t i = 0; i < g; ++i) out.push_back(RegionIndex{order[i]});
  std::sort(out.begin(), out.end());
  return out;
}

ValidRegionRule default_valid_region_rule(const WatermarkConfig& config,
                                          std::uint32_t region_count) {
  return [prime = config.prime, gamma = config.gamma, region_count](RegionIndex prev) {
    return select_valid_regions(prev, prime, region_count, gamma);
  };
}

std::string_view to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::kBlockedRegion: return "blocked-region";
    case RejectionReason::kMargin: return "margin";
    case RejectionReason::kDegenerate: return "degenerate";
  }
  return "unknown";
}

RejectionReason parse_rejection_reason(std::string_view text) {
  if (text == "blocked-region") return RejectionReason::kBlockedRegion;
  if (text == "margin") return RejectionReason::kMargin;
  if (text == "degenerate") return RejectionReason::kDegenerate;
  fail(ErrorCode::kFormat, "unknown rejection reason '" + std::string(text) + "'");
}

std::vector<std::string> GenerationTrace::texts() const {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

std::string GenerationTrace::document() const {
  std::string out(trim(prompt));
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

std::size_t GenerationTrace::candidates_drawn() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += static_cast<std::size_t>(s.accepted_on_try);
  return n;
}

std::size_t GenerationTrace::fallback_count() const {
  return static_cast<std::size_t>(
      std::count_if(sentences.begin(), sentences.end(), [](const auto& s) { return s.fallback; }));
}

namespace {

std::optional<std::string> first_sentence(const std::string& continuation) {
  auto segments = split_sentences(continuation);
  if (segments.empty()) return std::nullopt;
  return std::move(segments.front());
}

std::vector<std::string> prompt_context(const std::string& prompt) {
  auto context = split_sentences(prompt);
  if (context.empty()) fail(ErrorCode::kInsufficientText, "prompt has no sentence");
  return context;
}

}  // namespace

GenerationTrace generate_watermarked(SentenceGenerator& lm, const Embedder& embedder,
                                     const Partition& partition,
                                     const WatermarkConfig& config,
                                     const std::string& prompt, int num_sentences,
                                     const ValidRegionRule& rule) {
  if (mode_of(partition) != config.mode) {
    fail(ErrorCode::kConfig, "partition is " + std::string(to_string(mode_of(partition))) +
                                 " but the configuration expects " +
                                 std::string(to_string(config.mode)));
  }
  const std::uint32_t regions = region_count(partition);
  config.validate(regions);
  if (num_sentences < 1) fail(ErrorCode::kConfig, "number of sentences must be at least 1");
  if (embedder.dim() != dim_of(partition)) {
    fail(ErrorCode::kDimensionMismatch, "embedder dimension " + std::to_string(embedder.dim()) +
                                            " does not match partition dimension " +
                                            std::to_string(dim_of(partition)));
  }
  const ValidRegionRule valid_rule = rule ? rule : default_valid_region_rule(config, regions);

  GenerationTrace trace;
  trace.prompt = prompt;
  trace.config = config;
  std::vector<std::string> context = prompt_context(prompt);
  RegionIndex prev = region_of(partition, embedder.embed(context.back()));

  for (int step = 1; step <= num_sentences; ++step) {
    auto valid = valid_rule(prev);
    std::sort(valid.begin(), valid.end());

    std::optional<TraceSentence> chosen;
    std::optional<TraceSentence> last_candidate;
    for (int attempt = 1; attempt <= config.n_max; ++attempt) {
      auto reject = [&](RejectionReason reason) {
        trace.rejections.push_back(Rejection{step, attempt, reason});
      };
      const auto text = first_sentence(lm.next_sentence(context, attempt));
      if (!text) {
        reject(RejectionReason::kDegenerate);
        continue;
      }
      std::optional<Embedding> v;
      try {
        v = embedder.embed(*text);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateEmbedding) throw;
      }
      if (!v) {
        reject(RejectionReason::kDegenerate);
        continue;
      }
      const RegionIndex region = region_of(partition, *v);
      last_candidate = TraceSentence{*text, region, attempt, false};
      if (!margin_ok(partition, *v, config.margin)) {
        reject(RejectionReason::kMargin);
        continue;
      }
      if (!std::binary_search(valid.begin(), valid.end(), region)) {
        reject(RejectionReason::kBlockedRegion);
        continue;
      }
      chosen = std::move(last_candidate);
      break;
    }
    if (!chosen) {
      if (!last_candidate) {
        fail(ErrorCode::kDegenerateGenerator,
             "generator produced only degenerate sentences at step " + std::to_string(step));
      }
      chosen = std::move(last_candidate);
      chosen->accepted_on_try = config.n_max;
      chosen->fallback = true;
    }
    context.push_back(chosen->text);
    prev = chosen->region;
    trace.sentences.push_back(std::move(*chosen));
  }
  return trace;
}

std::vector<std::string> generate_plain(SentenceGenerator& lm, const std::string& prompt,
                                        int num_sentences) {
  if (num_sentences < 1) fail(ErrorCode::kConfig, "number of sentences must be at least 1");
  std::vector<std::string> context = prompt_context(prompt);
  std::vector<std::string> out;
  for (int step = 1; step <= num_sentences; ++step) {
    std::optional<std::string> text;
    for (int attempt = 1; attempt <= 100 && !text; ++attempt) {
      text = first_sentence(lm.next_sentence(context, attempt));
    }
    if (!text) fail(ErrorCode::kDegenerateGenerator, "generator produced no sentence");
    context.push_back(*text);
    out.push_back(std::move(*text));
  }
  return out;
}

}  // namespace semwm
