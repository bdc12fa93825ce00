#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "semwm/attacks.hpp"
#include "semwm/error.hpp"
#include "semwm/text.hpp"
#include "semwm/toy_vocab.hpp"

using namespace semwm;

namespace {

const std::string kSentence = "The stormy captain navigated the salty lagoon.";
const std::string kDocument =
    "The stormy captain navigated the salty lagoon. Knights guarded the royal tower! "
    "The chef baked the spicy pantry?";

double mean_similarity(double strength, int seeds, AttackMethod method = AttackMethod::kLexical) {
  const ToyEmbedder embedder;
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    AttackConfig config{.method = method, .strength = strength, .seed = std::uint64_t(s)};
    const auto out = attack_document(kSentence, config, embedder);
    sum += out.similarities.front();
  }
  return sum / seeds;
}

}  // namespace

TEST_CASE("strength zero is the identity") {
  const ToyEmbedder embedder;
  for (auto method : {AttackMethod::kLexical, AttackMethod::kResample}) {
    AttackConfig config{.method = method, .strength = 0.0, .seed = 4};
    const auto out = attack_document(kDocument, config, embedder);
    CHECK(out.text == kDocument);
    REQUIRE(out.similarities.size() == 3);
    for (double s : out.similarities) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("strength one replaces every covered word") {
  const auto& table = default_synonym_table();
  AttackConfig config{.strength = 1.0, .seed = 2};
  const auto before = tokenize(kSentence);
  const auto after = tokenize(lexical_paraphrase(kSentence, config));
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (table.contains(before[i])) {
      CHECK(after[i] != before[i]);
      const auto& alts = table.at(before[i]);
      CHECK(std::find(alts.begin(), alts.end(), after[i]) != alts.end());
    } else {
      CHECK(after[i] == before[i]);
    }
  }
}

TEST_CASE("lexical attack keeps capitals and punctuation") {
  AttackConfig config{.strength = 1.0, .seed = 9};
  const auto out = lexical_paraphrase("Knights guarded the tower!", config);
  CHECK(out.front() == 'K');
  CHECK(out.back() == '!');
  CHECK(out != "Knights guarded the tower!");
}

TEST_CASE("mild lexical attacks keep toy similarity high") {
  CHECK(mean_similarity(0.3, 1000) >= 0.9);
}

TEST_CASE("similarity falls with strength") {
  CHECK(mean_similarity(0.6, 500) <= mean_similarity(0.2, 500));
  CHECK(mean_similarity(0.6, 500, AttackMethod::kResample) <=
        mean_similarity(0.2, 500, AttackMethod::kResample));
}

TEST_CASE("resample swaps for a same-topic sentence") {
  const ToyEmbedder embedder;
  AttackConfig config{.method = AttackMethod::kResample, .strength = 1.0, .seed = 3};
  for (std::uint64_t s = 0; s < 50; ++s) {
    config.seed = s;
    const auto out = resample_paraphrase(kSentence, config, embedder);
    CHECK(out != kSentence);
    CHECK(toy_topic_of(out) == toy_topic_of(kSentence));
  }
  // No topic to stay on: left alone.
  CHECK(resample_paraphrase("Nothing known here.", config, embedder) == "Nothing known here.");
}

TEST_CASE("resample aims at the target similarity") {
  const ToyEmbedder embedder;
  double near = 0.0, far = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    AttackConfig config{.method = AttackMethod::kResample, .strength = 1.0, .seed = s};
    config.target_similarity = 0.9;
    near += attack_document(kSentence, config, embedder).similarities[0];
    config.target_similarity = 0.2;
    far += attack_document(kSentence, config, embedder).similarities[0];
  }
  CHECK(near > far);
}

TEST_CASE("attacks are deterministic") {
  const ToyEmbedder embedder;
  for (auto method : {AttackMethod::kLexical, AttackMethod::kResample}) {
    AttackConfig config{.method = method, .strength = 0.5, .seed = 77};
    const auto a = attack_document(kDocument, config, embedder);
    const auto b = attack_document(kDocument, config, embedder);
    CHECK(a.text == b.text);
    CHECK(a.similarities == b.similarities);
  }
}

TEST_CASE("similarities use the supplied embedder") {
  const ToyEmbedder embedder;
  AttackConfig config{.strength = 0.5, .seed = 5};
  const auto out = attack_document(kDocument, config, embedder);
  const auto orig = split_sentences(kDocument);
  const auto attacked = split_sentences(out.text);
  REQUIRE(orig.size() == attacked.size());
  for (std::size_t i = 0; i < orig.size(); ++i) {
    CHECK(out.similarities[i] ==
          doctest::Approx(embedder.embed(orig[i]).dot(embedder.embed(attacked[i]))).epsilon(1e-12));
  }
}

TEST_CASE("attack config errors") {
  CHECK(parse_attack_method("lexical") == AttackMethod::kLexical);
  CHECK(parse_attack_method("resample") == AttackMethod::kResample);
  CHECK_THROWS_AS(parse_attack_method("bigram"), Error);
  const ToyEmbedder embedder;
  AttackConfig bad{.strength = 1.5};
  CHECK_THROWS_AS(attack_document(kDocument, bad, embedder), Error);
}
