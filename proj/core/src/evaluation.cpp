#include "semwm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "semwm/error.hpp"
#include "semwm/partition.hpp"
#include "semwm/text.hpp"

namespace semwm {

namespace {

void require_scores(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) {
    fail(ErrorCode::kUndefinedMetric, "need at least one positive and one negative score");
  }
  for (auto side : {pos, neg}) {
    for (double x : side) {
      if (std::isnan(x)) fail(ErrorCode::kUndefinedMetric, "score is NaN");
    }
  }
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  return out;
}

// |{x in sorted : x > t}|
std::size_t count_above(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(sorted.end() -
                                  std::upper_bound(sorted.begin(), sorted.end(), t));
}

double entropy_bits(const std::map<std::string, std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

double auc(std::span<const double> pos, std::span<const double> neg) {
  require_scores(pos, neg);
  const auto sorted_neg = sorted_copy(neg);
  // Twice the Mann-Whitney U: each win counts 2, each tie 1.
  std::uint64_t doubled = 0;
  for (double p : pos) {
    const auto lo = std::lower_bound(sorted_neg.begin(), sorted_neg.end(), p);
    const auto hi = std::upper_bound(lo, sorted_neg.end(), p);
    doubled += 2 * static_cast<std::uint64_t>(lo - sorted_neg.begin()) +
               static_cast<std::uint64_t>(hi - lo);
  }
  return static_cast<double>(doubled) /
         (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double tp_at_fpr(std::span<const double> pos, std::span<const double> neg, double fpr) {
  require_scores(pos, neg);
  if (!(fpr > 0.0 && fpr < 1.0)) fail(ErrorCode::kConfig, "fpr must lie in (0, 1)");
  auto desc = sorted_copy(neg);
  std::reverse(desc.begin(), desc.end());
  const auto allowed = static_cast<std::size_t>(
      std::floor(fpr * static_cast<double>(desc.size()) + 1e-9));
  const double threshold = desc[std::min(allowed, desc.size() - 1)];
  const auto sorted_pos = sorted_copy(pos);
  return static_cast<double>(count_above(sorted_pos, threshold)) /
         static_cast<double>(pos.size());
}

std::vector<RocPoint> roc_curve(std::span<const double> pos, std::span<const double> neg) {
  require_scores(pos, neg);
  const auto sp = sorted_copy(pos);
  const auto sn = sorted_copy(neg);
  std::vector<double> thresholds(sp);
  thresholds.insert(thresholds.end(), sn.begin(), sn.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RocPoint> out;
  out.reserve(thresholds.size() + 1);
  for (double t : thresholds) {
    out.push_back(RocPoint{t, static_cast<double>(count_above(sn, t)) / sn.size(),
                           static_cast<double>(count_above(sp, t)) / sp.size()});
  }
  out.push_back(RocPoint{-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return out;
}

RocReport roc_report(std::span<const double> pos, std::span<const double> neg,
                     std::span<const double> fprs) {
  RocReport r;
  r.auc = auc(pos, neg);
  for (double f : fprs) r.tp_at[f] = tp_at_fpr(pos, neg, f);
  r.n_pos = pos.size();
  r.n_neg = neg.size();
  return r;
}

double ent3(std::span<const std::string> corpus) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& doc : corpus) {
    const auto tokens = tokenize(doc);
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
      std::string key = tokens[i];
      key.push_back('\x1f');
      key += tokens[i + 1];
      key.push_back('\x1f');
      key += tokens[i + 2];
      ++counts[key];
      ++total;
    }
  }
  if (total == 0) fail(ErrorCode::kUndefinedMetric, "corpus has no word trigram");
  return entropy_bits(counts, total);
}

SemEntResult sem_ent(std::span<const std::string> docs, const Embedder& embedder,
                     std::size_t k, std::uint64_t seed) {
  if (docs.size() < k) {
    fail(ErrorCode::kInsufficientData, "Sem-Ent needs at least k = " + std::to_string(k) +
                                           " documents, got " + std::to_string(docs.size()));
  }
  std::vector<Embedding> doc_vectors;
  doc_vectors.reserve(docs.size());
  for (const auto& doc : docs) {
    auto sentences = split_sentences(doc);
    if (sentences.empty()) fail(ErrorCode::kDegenerateEmbedding, "empty document");
    std::vector<double> sum(embedder.dim(), 0.0);
    for (const auto& v : embedder.embed_batch(sentences)) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    }
    doc_vectors.push_back(Embedding::normalize(sum));
  }

  SemEntResult result;
  result.embedder_note = "document embedding = normalized mean of sentence embeddings from " +
                         embedder.name();
  KMeansOptions options;
  options.k = k;
  options.seed = seed;
  try {
    const auto fit = fit_kmeans(doc_vectors, options);
    std::map<std::string, std::size_t> histogram;
    for (const auto& label : fit.assignment) ++histogram[std::to_string(label.value)];
    result.bits = entropy_bits(histogram, fit.assignment.size());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateCorpus) throw;
    result.bits = 0.0;
    result.degenerate = true;
  }
  return result;
}

EfficiencyReport efficiency_stats(std::span<const GenerationTrace> traces) {
  EfficiencyReport r;
  std::size_t blocked = 0, margin = 0, degenerate = 0;
  for (const auto& t : traces) {
    r.sentences += t.sentences.size();
    r.candidates += t.candidates_drawn();
    r.fallbacks += t.fallback_count();
    r.rejections += t.rejections.size();
    for (const auto& rej : t.rejections) {
      switch (rej.reason) {
        case RejectionReason::kBlockedRegion: ++blocked; break;
        case RejectionReason::kMargin: ++margin; break;
        case RejectionReason::kDegenerate: ++degenerate; break;
      }
    }
  }
  if (r.sentences > 0) {
    r.candidates_per_sentence = static_cast<double>(r.candidates) / r.sentences;
    r.fallback_rate = static_cast<double>(r.fallbacks) / r.sentences;
  }
  if (r.rejections > 0) {
    const double n = static_cast<double>(r.rejections);
    r.blocked_share = blocked / n;
    r.margin_share = margin / n;
    r.degenerate_share = degenerate / n;
  }
  return r;
}

}  // namespace semwm
