#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "semwm/embedding.hpp"
#include "semwm/generation.hpp"

namespace semwm {

/// Mann-Whitney AUC: P(pos > neg) + 0.5 P(pos = neg), counted exactly.
/// Throws kUndefinedMetric when either side is empty.
double auc(std::span<const double> pos, std::span<const double> neg);

/// Threshold t = smallest value with |{neg > t}| / n_neg <= fpr; returns
/// |{pos > t}| / n_pos.
double tp_at_fpr(std::span<const double> pos, std::span<const double> neg, double fpr);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

/// One point per distinct score, thresholds descending, plus (1,1).
std::vector<RocPoint> roc_curve(std::span<const double> pos, std::span<const double> neg);

struct RocReport {
  double auc = 0.0;
  std::map<double, double> tp_at;  // fpr -> tpr
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

RocReport roc_report(std::span<const double> pos, std::span<const double> neg,
                     std::span<const double> fprs = std::span<const double>{});

/// Shannon entropy (bits) of word-trigram frequencies; trigrams do not cross
/// document boundaries. Throws kUndefinedMetric when there are none.
double ent3(std::span<const std::string> corpus);

struct SemEntResult {
  double bits = 0.0;
  bool degenerate = false;  // every document embedded to the same point
  std::string embedder_note;
};

inline constexpr std::size_t kDefaultSemEntClusters = 50;

/// Entropy (bits) of k-means assignments of document embeddings, where a
/// document's embedding is the normalized mean of its sentence embeddings.
SemEntResult sem_ent(std::span<const std::string> docs, const Embedder& embedder,
                     std::size_t k, std::uint64_t seed);

struct EfficiencyReport {
  std::size_t sentences = 0;
  std::size_t candidates = 0;
  std::size_t rejections = 0;
  std::size_t fallbacks = 0;
  double candidates_per_sentence = 0.0;
  double blocked_share = 0.0;     // of rejections
  double margin_share = 0.0;      // of rejections
  double degenerate_share = 0.0;  // of rejections
  double fallback_rate = 0.0;     // of sentences
};

EfficiencyReport efficiency_stats(std::span<const GenerationTrace> traces);

}  // namespace semwm
