#include "semwm/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "semwm/error.hpp"
#include "semwm/text.hpp"

namespace semwm {

std::vector<bool> DetectionResult::valid_flags() const {
  std::vector<bool> flags;
  for (const auto& s : per_sentence) {
    if (s.counted) flags.push_back(s.valid);
  }
  return flags;
}

double z_score(int valid_count, int total, double gamma) {
  if (total <= 0) fail(ErrorCode::kUndefinedStatistic, "z-score needs at least one sentence");
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::kConfig, "gamma must lie in (0, 1)");
  if (valid_count < 0 || valid_count > total) {
    fail(ErrorCode::kConfig, "valid count must lie in [0, total]");
  }
  const double n = static_cast<double>(total);
  return (static_cast<double>(valid_count) - gamma * n) / std::sqrt(gamma * (1.0 - gamma) * n);
}

DetectionResult detect_regions(std::span<const RegionIndex> regions, std::uint32_t region_count,
                               const WatermarkConfig& config, const ValidRegionRule& rule) {
  if (regions.size() < 2) {
    fail(ErrorCode::kInsufficientText, "detection needs at least two sentences");
  }
  config.validate(region_count);
  const ValidRegionRule valid_rule = rule ? rule : default_valid_region_rule(config, region_count);

  // At most R distinct seeds occur; cache their valid sets.
  std::map<RegionIndex, std::vector<RegionIndex>> cache;
  auto valid_after = [&](RegionIndex prev) -> const std::vector<RegionIndex>& {
    auto it = cache.find(prev);
    if (it == cache.end()) {
      auto set = valid_rule(prev);
      std::sort(set.begin(), set.end());
      it = cache.emplace(prev, std::move(set)).first;
    }
    return it->second;
  };

  DetectionResult result;
  result.per_sentence.reserve(regions.size());
  result.per_sentence.push_back(SentenceVerdict{{}, regions[0], false, false});
  for (std::size_t t = 1; t < regions.size(); ++t) {
    const auto& valid = valid_after(regions[t - 1]);
    const bool ok = std::binary_search(valid.begin(), valid.end(), regions[t]);
    result.per_sentence.push_back(SentenceVerdict{{}, regions[t], true, ok});
    result.valid_count += ok ? 1 : 0;
  }
  result.sentence_count = static_cast<int>(regions.size()) - 1;
  result.z = z_score(result.valid_count, result.sentence_count, config.gamma);
  result.null_rate = static_cast<double>(valid_region_count(region_count, config.gamma)) /
                     static_cast<double>(region_count);
  return result;
}

DetectionResult detect(const std::string& text, const Embedder& embedder,
                       const Partition& partition, const WatermarkConfig& config,
                       const ValidRegionRule& rule) {
  if (mode_of(partition) != config.mode) {
    fail(ErrorCode::kConfig, "partition mode does not match the configuration");
  }
  if (embedder.dim() != dim_of(partition)) {
    fail(ErrorCode::kDimensionMismatch, "embedder dimension " + std::to_string(embedder.dim()) +
                                            " does not match partition dimension " +
                                            std::to_string(dim_of(partition)));
  }
  const auto sentences = split_sentences(text);
  if (sentences.size() < 2) {
    fail(ErrorCode::kInsufficientText, "detection needs at least two sentences");
  }
  const auto embeddings = embedder.embed_batch(sentences);
  std::vector<RegionIndex> regions;
  regions.reserve(embeddings.size());
  for (const auto& v : embeddings) regions.push_back(region_of(partition, v));

  DetectionResult result = detect_regions(regions, region_count(partition), config, rule);
  for (std::size_t i = 0; i < sentences.size(); ++i) result.per_sentence[i].text = sentences[i];
  return result;
}

ThresholdTable calibrate_thresholds(std::span<const double> human_z,
                                    std::span<const double> targets) {
  if (human_z.empty()) fail(ErrorCode::kUndefinedMetric, "calibration needs human scores");
  std::vector<double> sorted(human_z.begin(), human_z.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto fpr_at = [&](double threshold) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), threshold);
    return static_cast<double>(above) / n;
  };

  const int steps = static_cast<int>(std::lround(kThresholdMax / kThresholdStep));
  ThresholdTable table;
  for (double target : targets) {
    if (!(target > 0.0 && target < 1.0)) fail(ErrorCode::kConfig, "target FPR must lie in (0, 1)");
    ThresholdEntry entry{target, kThresholdMax, fpr_at(kThresholdMax), true};
    for (int i = 0; i <= steps; ++i) {
      const double m = static_cast<double>(i) / 100.0;
      const double fpr = fpr_at(m);
      if (fpr <= target) {
        entry = ThresholdEntry{target, m, fpr, false};
        break;
      }
    }
    table.entries.push_back(entry);
  }
  return table;
}

}  // namespace semwm
