#include <array>
#include <string>

#include "semwm/error.hpp"
#include "semwm/generation.hpp"
#include "semwm/rng.hpp"
#include "semwm/toy_vocab.hpp"

namespace semwm {

namespace {

// Slot codes: N noun, n capitalized noun, V verb, A adjective, P place.
constexpr std::array<std::string_view, 6> kTemplates = {
    "The A N V the N.",
    "The N V the A P.",
    "n V the A N.",
    "The A N V the P?",
    "The N V the A N!",
    "n V the N of the P.",
};

const std::string& pick(const std::vector<std::string>& pool, Xoshiro256& rng) {
  return pool[rng.below(pool.size())];
}

std::string render(std::string_view tmpl, const ToyTopic& topic, Xoshiro256& rng) {
  std::string out;
  for (char c : tmpl) {
    switch (c) {
      case 'N': out += pick(topic.nouns, rng); break;
      case 'n': {
        std::string w = pick(topic.nouns, rng);
        w[0] = static_cast<char>(w[0] - 'a' + 'A');
        out += w;
        break;
      }
      case 'V': out += pick(topic.verbs, rng); break;
      case 'A': out += pick(topic.adjectives, rng); break;
      case 'P': out += pick(topic.places, rng); break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::uint64_t context_key(std::uint64_t seed, std::span<const std::string> context) {
  std::uint64_t key = derive_seed(seed, static_cast<std::uint64_t>(context.size()));
  if (!context.empty()) key = mix64(key ^ fnv1a64(context.back()));
  return key;
}

}  // namespace

ToyLanguageModel::ToyLanguageModel(ToyLmOptions options) : options_(options) {
  if (!(options_.spread >= 0.0 && options_.spread <= 1.0)) {
    fail(ErrorCode::kConfig, "toy generator spread must lie in [0, 1]");
  }
}

std::string ToyLanguageModel::next_sentence(std::span<const std::string> context,
                                            int try_index) {
  const std::uint64_t key = context_key(options_.seed, context);
  const std::size_t base_template = Xoshiro256(key).below(kTemplates.size());
  Xoshiro256 rng(derive_seed(key, static_cast<std::uint64_t>(try_index)));

  const auto& topics = toy_topics();
  std::optional<std::size_t> topic;
  if (!context.empty()) topic = toy_topic_of(context.back());
  if (!topic || rng.bernoulli(options_.spread)) topic = rng.below(topics.size());

  const auto slot = (base_template + static_cast<std::size_t>(try_index)) % kTemplates.size();
  return render(kTemplates[slot], topics[*topic], rng);
}

std::string ToyLanguageModel::sentence_on_topic(std::size_t topic, std::uint64_t rng_seed) {
  const auto& topics = toy_topics();
  if (topic >= topics.size()) fail(ErrorCode::kConfig, "unknown toy topic");
  Xoshiro256 rng(rng_seed);
  const auto slot = rng.below(kTemplates.size());
  return render(kTemplates[slot], topics[topic], rng);
}

std::string ToyLanguageModel::prompt(std::uint64_t index) const {
  const std::uint64_t s = derive_seed(derive_seed(options_.seed, "prompt"), index);
  return sentence_on_topic(Xoshiro256(s).below(toy_topics().size()), mix64(s));
}

}  // namespace semwm
