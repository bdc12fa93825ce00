#include "semwm/attacks.hpp"

#include <cmath>

#include "semwm/error.hpp"
#include "semwm/generation.hpp"
#include "semwm/rng.hpp"
#include "semwm/text.hpp"

namespace semwm {

std::string_view to_string(AttackMethod method) {
  return method == AttackMethod::kLexical ? "lexical" : "resample";
}

AttackMethod parse_attack_method(std::string_view text) {
  if (text == "lexical") return AttackMethod::kLexical;
  if (text == "resample") return AttackMethod::kResample;
  fail(ErrorCode::kConfig, "unknown attack method '" + std::string(text) + "'");
}

const SynonymTable& AttackConfig::synonym_table() const {
  return synonyms ? *synonyms : default_synonym_table();
}

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string lower(std::string_view w) {
  std::string out(w);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

void check_strength(double strength) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    fail(ErrorCode::kConfig, "attack strength must lie in [0, 1]");
  }
}

}  // namespace

std::string lexical_paraphrase(const std::string& sentence, const AttackConfig& config) {
  check_strength(config.strength);
  const auto& table = config.synonym_table();
  Xoshiro256 rng(derive_seed(config.seed, fnv1a64(sentence)));
  std::string out;
  out.reserve(sentence.size());
  std::size_t i = 0;
  while (i < sentence.size()) {
    if (!is_word_char(sentence[i])) {
      out.push_back(sentence[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < sentence.size() && is_word_char(sentence[j])) ++j;
    const std::string_view word(sentence.data() + i, j - i);
    const auto it = table.find(lower(word));
    if (it == table.end() || it->second.empty()) {
      out.append(word);
    } else {
      const bool replace = rng.uniform01() < config.strength;
      const auto& alt = it->second[rng.below(it->second.size())];
      if (replace) {
        std::string w = alt;
        if (word[0] >= 'A' && word[0] <= 'Z' && !w.empty() && w[0] >= 'a' && w[0] <= 'z') {
          w[0] = static_cast<char>(w[0] - 'a' + 'A');
        }
        out += w;
      } else {
        out.append(word);
      }
    }
    i = j;
  }
  return out;
}

std::string resample_paraphrase(const std::string& sentence, const AttackConfig& config,
                                const Embedder& embedder) {
  check_strength(config.strength);
  if (!(config.target_similarity > 0.0 && config.target_similarity <= 1.0)) {
    fail(ErrorCode::kConfig, "target similarity must lie in (0, 1]");
  }
  Xoshiro256 rng(derive_seed(config.seed, fnv1a64(sentence)));
  if (!(rng.uniform01() < config.strength)) return sentence;
  const auto topic = toy_topic_of(sentence);
  if (!topic) return sentence;

  constexpr int kCandidates = 16;
  const Embedding original = embedder.embed(sentence);
  const std::uint64_t base = rng.next();
  std::string best = sentence;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int c = 0; c < kCandidates; ++c) {
    auto candidate = ToyLanguageModel::sentence_on_topic(*topic, derive_seed(base, c));
    const double sim = original.dot(embedder.embed(candidate));
    const double gap = std::abs(sim - config.target_similarity);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(candidate);
    }
  }
  return best;
}

AttackedDocument attack_document(const std::string& text, const AttackConfig& config,
                                 const Embedder& embedder) {
  check_strength(config.strength);
  const auto sentences = split_sentences(text);
  std::vector<std::string> attacked;
  attacked.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    AttackConfig local = config;
    local.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    attacked.push_back(config.method == AttackMethod::kLexical
                           ? lexical_paraphrase(sentences[i], local)
                           : resample_paraphrase(sentences[i], local, embedder));
  }
  AttackedDocument doc;
  doc.text = join_sentences(attacked);
  if (sentences.empty()) return doc;
  const auto before = embedder.embed_batch(sentences);
  const auto after = embedder.embed_batch(attacked);
  doc.similarities.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    doc.similarities.push_back(attacked[i] == sentences[i] ? 1.0 : before[i].dot(after[i]));
  }
  return doc;
}

}  // namespace semwm
