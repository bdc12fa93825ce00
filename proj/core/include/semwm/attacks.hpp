#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "semwm/embedding.hpp"
#include "semwm/toy_vocab.hpp"

namespace semwm {

enum class AttackMethod { kLexical, kResample };

std::string_view to_string(AttackMethod method);
AttackMethod parse_attack_method(std::string_view text);

struct AttackConfig {
  AttackMethod method = AttackMethod::kLexical;
  /// Lexical: per-word replacement probability. Resample: per-sentence
  /// replacement probability.
  double strength = 0.0;
  std::uint64_t seed = 0;
  std::shared_ptr<const SynonymTable> synonyms;  // null means the default table
  /// Resample: aim for this cosine similarity to the original sentence.
  double target_similarity = 0.8;

  const SynonymTable& synonym_table() const;
};

/// Replaces each table word independently with probability `strength`,
/// picking uniformly among its alternatives and keeping a leading capital.
/// Every covered word consumes two draws whether or not it is replaced, so
/// runs with the same seed are coupled across strengths.
std::string lexical_paraphrase(const std::string& sentence, const AttackConfig& config);

/// With probability `strength`, swaps the sentence for a fresh toy sentence
/// on the same topic whose similarity is closest to target_similarity.
std::string resample_paraphrase(const std::string& sentence, const AttackConfig& config,
                                const Embedder& embedder);

struct AttackedDocument {
  std::string text;
  std::vector<double> similarities;  // cosine, original vs attacked, per sentence
};

/// Attacks every sentence (sentence i uses sub-seed derive_seed(seed, i)).
AttackedDocument attack_document(const std::string& text, const AttackConfig& config,
                                 const Embedder& embedder);

}  // namespace semwm
