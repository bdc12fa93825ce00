#pragma once

#include <span>
#include <string>
#include <vector>

#include "semwm/embedding.hpp"
#include "semwm/generation.hpp"
#include "semwm/partition.hpp"

namespace semwm {

struct SentenceVerdict {
  std::string text;
  RegionIndex region;
  bool counted = false;  // false only for the seeding first sentence
  bool valid = false;
};

struct DetectionResult {
  int sentence_count = 0;  // S_T, tested sentences (all but the first)
  int valid_count = 0;     // S_V
  double z = 0.0;
  /// g / R, the exact null rate of a valid flag; differs from gamma when
  /// gamma * R is not integral.
  double null_rate = 0.0;
  std::vector<SentenceVerdict> per_sentence;

  std::vector<bool> valid_flags() const;
};

/// (S_V - gamma N) / sqrt(gamma (1 - gamma) N). Throws kUndefinedStatistic
/// for N = 0 and kConfig for out-of-range arguments.
double z_score(int valid_count, int total, double gamma);

/// Validity counting over an already-assigned region sequence. The first
/// region only seeds; sentence t >= 2 is valid iff its region is in the valid
/// set of sentence t-1. Throws kInsufficientText for fewer than two regions.
DetectionResult detect_regions(std::span<const RegionIndex> regions,
                               std::uint32_t region_count,
                               const WatermarkConfig& config,
                               const ValidRegionRule& rule = {});

/// Split, embed, assign (no margin test) and count.
DetectionResult detect(const std::string& text, const Embedder& embedder,
                       const Partition& partition, const WatermarkConfig& config,
                       const ValidRegionRule& rule = {});

struct ThresholdEntry {
  double target_fpr = 0.0;
  double threshold = 0.0;
  double achieved_fpr = 0.0;
  bool saturated = false;  // no grid threshold reached the target
};

struct ThresholdTable {
  std::vector<ThresholdEntry> entries;
};

inline constexpr double kThresholdMax = 6.0;
inline constexpr double kThresholdStep = 0.01;

/// For each target r, the smallest M on the grid 0, 0.01, ..., 6.0 whose
/// human false-positive rate |{z > M}| / n is at most r.
ThresholdTable calibrate_thresholds(std::span<const double> human_z,
                                    std::span<const double> targets);

/// Machine-generated iff z > threshold.
constexpr bool classify(double z, double threshold) noexcept { return z > threshold; }

}  // namespace semwm
