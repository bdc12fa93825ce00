#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "semwm/error.hpp"
#include "semwm/evaluation.hpp"

using namespace semwm;

namespace {

using D = std::vector<double>;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kContract;
}

D normals(std::size_t n, double shift, Xoshiro256& rng) {
  D out(n);
  for (auto& x : out) x = rng.normal() + shift;
  return out;
}

}  // namespace

TEST_CASE("auc examples") {
  CHECK(auc(D{3, 4}, D{1, 2}) == 1.0);
  CHECK(auc(D{1, 2}, D{1, 2}) == 0.5);
  CHECK(auc(D{2.0, 0.5}, D{1.0, 0.1}) == 0.75);
  CHECK(auc(D{1}, D{2}) == 0.0);
  CHECK(code_of([] { auc(D{}, D{1}); }) == ErrorCode::kUndefinedMetric);
  CHECK(code_of([] { auc(D{1}, D{}); }) == ErrorCode::kUndefinedMetric);
}

TEST_CASE("auc properties against brute force") {
  Xoshiro256 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    D pos, neg;
    for (int i = 0; i < 40; ++i) pos.push_back(double(rng.below(10)));
    for (int i = 0; i < 55; ++i) neg.push_back(double(rng.below(10)) - 1.0);
    const double a = auc(pos, neg);
    CHECK(a == doctest::Approx(testing::auc_bruteforce(pos, neg)).epsilon(1e-15));
    CHECK(a + auc(neg, pos) == doctest::Approx(1.0).epsilon(1e-15));
    D tp = pos, tn = neg;
    for (auto& x : tp) x = std::exp(x / 3.0) + 7.0;
    for (auto& x : tn) x = std::exp(x / 3.0) + 7.0;
    CHECK(auc(tp, tn) == a);
  }
}

TEST_CASE("tp at fpr") {
  CHECK(tp_at_fpr(D{5, 6, 7}, D{0, 1, 2}, 0.01) == 1.0);
  CHECK(tp_at_fpr(D{5, 6, 7}, D{0, 1, 2}, 0.5) == 1.0);
  CHECK(code_of([] { tp_at_fpr(D{1}, D{}, 0.05); }) == ErrorCode::kUndefinedMetric);
  CHECK_THROWS_AS(tp_at_fpr(D{1}, D{2}, 0.0), Error);
  CHECK_THROWS_AS(tp_at_fpr(D{1}, D{2}, 1.0), Error);

  Xoshiro256 rng(21);
  const auto pos = normals(10000, 0.0, rng);
  const auto neg = normals(10000, 0.0, rng);
  for (double f : {0.01, 0.05, 0.1}) CHECK(std::abs(tp_at_fpr(pos, neg, f) - f) <= 0.01);

  const auto shifted = normals(2000, 1.0, rng);
  double last = 0.0;
  for (double f = 0.01; f < 0.5; f += 0.01) {
    const double t = tp_at_fpr(shifted, neg, f);
    CHECK(t >= last);
    last = t;
  }
}

TEST_CASE("empirical fpr at the tp threshold respects the target") {
  // Ten negatives: fpr 0.25 allows two above the threshold, so the
  // threshold is the third largest negative, 7.
  const D neg{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(tp_at_fpr(D{7.5, 6.5, 8.5, 9.5}, neg, 0.25) == 0.75);
  CHECK(tp_at_fpr(D{7.0, 7.0}, neg, 0.25) == 0.0);
}

TEST_CASE("roc curve") {
  const auto roc = roc_curve(D{3, 2}, D{2, 1});
  REQUIRE_FALSE(roc.empty());
  CHECK(roc.back().fpr == 1.0);
  CHECK(roc.back().tpr == 1.0);
  for (std::size_t i = 1; i < roc.size(); ++i) {
    CHECK(roc[i].fpr >= roc[i - 1].fpr);
    CHECK(roc[i].tpr >= roc[i - 1].tpr);
  }
  const auto report = roc_report(D{3, 2}, D{2, 1}, D{0.01, 0.05});
  CHECK(report.auc == auc(D{3, 2}, D{2, 1}));
  CHECK(report.n_pos == 2);
  CHECK(report.n_neg == 2);
  CHECK(report.tp_at.size() == 2);
}

TEST_CASE("ent3 examples") {
  CHECK(ent3(std::vector<std::string>{"a b c a b c a b c"}) ==
        doctest::Approx(testing::entropy_bits(std::vector<std::size_t>{3, 2, 2})));
  CHECK(ent3(std::vector<std::string>{"x y z", "x y z", "x y z"}) == 0.0);
  CHECK(ent3(std::vector<std::string>{"a b c", "d e f", "g h i", "j k l"}) ==
        doctest::Approx(2.0).epsilon(1e-15));
  // Trigrams do not cross documents.
  CHECK(ent3(std::vector<std::string>{"a b", "c d e"}) == 0.0);
  CHECK(code_of([] { ent3(std::vector<std::string>{"a b", "c"}); }) == ErrorCode::kUndefinedMetric);
}

TEST_CASE("ent3 is invariant under duplication and permutation") {
  const auto corpus = testing::make_toy_corpus(200, 4).sentences;
  auto doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  auto reversed = corpus;
  std::reverse(reversed.begin(), reversed.end());
  const double e = ent3(corpus);
  CHECK(ent3(doubled) == doctest::Approx(e).epsilon(1e-12));
  CHECK(ent3(reversed) == doctest::Approx(e).epsilon(1e-12));
  CHECK(e > 0.0);
}

TEST_CASE("sem_ent") {
  const testing::AxisEmbedder embedder(2);
  std::vector<std::string> docs;
  for (int i = 0; i < 10; ++i) docs.push_back("r0 a" + std::to_string(i) + ".");
  for (int i = 0; i < 10; ++i) docs.push_back("r1 b" + std::to_string(i) + ".");
  const auto balanced = sem_ent(docs, embedder, 2, 1);
  CHECK(balanced.bits == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(balanced.degenerate);
  CHECK(balanced.embedder_note.find("axis") != std::string::npos);

  const std::vector<std::string> same(10, "r0 same.");
  const auto flat = sem_ent(same, embedder, 2, 1);
  CHECK(flat.bits == 0.0);
  CHECK(flat.degenerate);

  const std::vector<std::string> few(3, "r0 x.");
  CHECK(code_of([&] { sem_ent(few, embedder, 5, 1); }) == ErrorCode::kInsufficientData);
}

TEST_CASE("sem_ent on toy documents") {
  const ToyEmbedder embedder;
  const auto corpus = testing::make_toy_corpus(400, 8).sentences;
  const auto r = sem_ent(corpus, embedder, 8, 2);
  CHECK(r.bits > 2.5);
  CHECK(r.bits <= 3.0 + 1e-12);
  auto shuffled = corpus;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(sem_ent(corpus, embedder, 8, 2).bits == r.bits);
}

TEST_CASE("efficiency on a rigged trace") {
  GenerationTrace a;
  a.config.n_max = 4;
  a.sentences = {{"x.", RegionIndex{0}, 1, false},
                 {"y.", RegionIndex{1}, 3, false},
                 {"z.", RegionIndex{2}, 4, true}};
  a.rejections = {{2, 1, RejectionReason::kMargin},       {2, 2, RejectionReason::kBlockedRegion},
                  {3, 1, RejectionReason::kMargin},       {3, 2, RejectionReason::kMargin},
                  {3, 3, RejectionReason::kDegenerate},   {3, 4, RejectionReason::kBlockedRegion}};
  GenerationTrace b;
  b.sentences = {{"w.", RegionIndex{0}, 1, false}};
  const std::vector<GenerationTrace> traces{a, b};
  const auto r = efficiency_stats(traces);
  CHECK(r.sentences == 4);
  CHECK(r.candidates == 9);
  CHECK(r.rejections == 6);
  CHECK(r.fallbacks == 1);
  CHECK(r.candidates_per_sentence == 9.0 / 4.0);
  CHECK(r.margin_share == 3.0 / 6.0);
  CHECK(r.blocked_share == 2.0 / 6.0);
  CHECK(r.degenerate_share == 1.0 / 6.0);
  CHECK(r.fallback_rate == 0.25);
}

TEST_CASE("efficiency with every sentence accepted first") {
  GenerationTrace t;
  for (int i = 0; i < 5; ++i) t.sentences.push_back({"s.", RegionIndex{0}, 1, false});
  const auto r = efficiency_stats(std::vector<GenerationTrace>{t});
  CHECK(r.candidates_per_sentence == 1.0);
  CHECK(r.rejections == 0);
  CHECK(r.margin_share == 0.0);
  CHECK(r.fallback_rate == 0.0);
  CHECK(efficiency_stats(std::vector<GenerationTrace>{}).sentences == 0);
}
