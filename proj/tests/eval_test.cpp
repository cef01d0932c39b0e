#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "vidchat/eval/generation.hpp"
#include "vidchat/eval/phrase_metrics.hpp"
#include "vidchat/eval/retrieval.hpp"
#include "vidchat/eval/significance.hpp"

namespace vidchat::eval {
namespace {

Tokens words(const std::string& s) {
  Tokens t;
  std::istringstream in(s);
  for (std::string w; in >> w;) t.push_back(w);
  return t;
}

models::Dataset toy_data(std::size_t n, std::size_t videos) {
  models::Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    models::Example e;
    e.video_id = "v" + std::to_string(i % videos);
    e.id = e.video_id + "#" + std::to_string(i / videos);
    e.chat = {4, 5};
    e.response = {6 + i};
    data.push_back(e);
  }
  return data;
}

// Binomial 99.9% band around p for n trials.
void expect_near_rate(double rate, double p, std::size_t n) {
  EXPECT_NEAR(rate, p, 3.3 * std::sqrt(p * (1 - p) / static_cast<double>(n)));
}

TEST(Recall, StrictBestPositiveHitsEveryK) {
  RankedCandidateList l{"x", 0, {0.1, 0.9, 0.2, 0.3, 0, 0, 0, 0, 0, 0}, 1};
  EXPECT_EQ(recall_at_k(l, 1), 1);
  EXPECT_EQ(recall_at_k(l, 2), 1);
  EXPECT_EQ(recall_at_k(l, 5), 1);
}

TEST(Recall, ThirdPlaceOnlyCountsAtFive) {
  RankedCandidateList l{"x", 0, {0.5, 0.9, 0.4, 0.8, 0, 0, 0, 0, 0, 0}, 0};
  EXPECT_EQ(positive_rank(l.scores, 0), 3u);
  EXPECT_EQ(recall_at_k(l, 1), 0);
  EXPECT_EQ(recall_at_k(l, 2), 0);
  EXPECT_EQ(recall_at_k(l, 5), 1);
}

TEST(Recall, TiesGoToTheSmallerIndex) {
  const std::vector<double> s(10, 1.0);
  for (std::size_t p = 0; p < 10; ++p) EXPECT_EQ(positive_rank(s, p), p + 1);
}

TEST(Recall, RandomScoresGiveChanceRates) {
  Rng rng = make_rng(5, "random-scores");
  const std::size_t n = 20000;
  double r1 = 0, r2 = 0, r5 = 0;
  for (std::size_t t = 0; t < n; ++t) {
    RankedCandidateList l;
    for (int k = 0; k < 10; ++k) l.scores.push_back(uniform_real(rng, 0, 1));
    l.positive_index = uniform_index(rng, 10);
    const int a = recall_at_k(l, 1), b = recall_at_k(l, 2), c = recall_at_k(l, 5);
    EXPECT_LE(a, b);
    EXPECT_LE(b, c);
    r1 += a;
    r2 += b;
    r5 += c;
  }
  expect_near_rate(r1 / n, 0.1, n);
  expect_near_rate(r2 / n, 0.2, n);
  expect_near_rate(r5 / n, 0.5, n);
}

TEST(Retrieval, OracleScorerIsPerfect) {
  const auto data = toy_data(30, 6);
  const auto res = evaluate_retrieval(oracle_scorer(), data, 3);
  EXPECT_EQ(res.r1, 1.0);
  EXPECT_EQ(res.r2, 1.0);
  EXPECT_EQ(res.r5, 1.0);
  EXPECT_EQ(res.records.size(), 30u);
}

TEST(Retrieval, ConstantScorerIsAtChance) {
  const auto data = toy_data(50, 10);
  std::vector<InstanceRecord> all;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto res = evaluate_retrieval(constant_scorer(), data, seed);
    all.insert(all.end(), res.records.begin(), res.records.end());
  }
  const auto res = summarize(all);
  expect_near_rate(res.r1, 0.1, all.size());
  expect_near_rate(res.r2, 0.2, all.size());
  expect_near_rate(res.r5, 0.5, all.size());
}

TEST(Retrieval, RecordsSerializeAllFields) {
  const auto data = toy_data(12, 3);
  const auto res = evaluate_retrieval(oracle_scorer(), data, 9, {0, 1});
  std::ostringstream os;
  write_records(os, res);
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* k : {"instance_id", "seed", "scores", "positive_index", "r1", "r2", "r5"})
      EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["scores"].size(), 10u);
    EXPECT_EQ(j["seed"], 9);
    ++lines;
  }
  EXPECT_EQ(lines, 2u);
}

// Independent LCS: memoized recursion over suffixes.
std::size_t lcs_oracle(const Tokens& a, const Tokens& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t v = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = v;
    return v;
  };
  return go(0, 0);
}

TEST(RougeL, HandCases) {
  EXPECT_DOUBLE_EQ(rouge_l(words("a b c"), {words("a b c")}), 1.0);
  EXPECT_EQ(lcs_length(words("a c d"), words("a b c d")), 3u);
  const double p = 1.0, r = 0.75, b2 = 1.44;
  EXPECT_NEAR(rouge_l(words("a c d"), {words("a b c d")}), (1 + b2) * p * r / (r + b2 * p), 1e-15);
  EXPECT_EQ(rouge_l(words("x y"), {words("a b")}), 0.0);
  EXPECT_EQ(rouge_l({}, {words("a b")}), 0.0);
  EXPECT_THROW(rouge_l(words("a"), {}), ContractError);
}

TEST(RougeL, MatchesBruteForceOnRandomPairs) {
  Rng rng = make_rng(1, "lcs");
  const Tokens alphabet = {"a", "b", "c", "d"};
  for (int t = 0; t < 1000; ++t) {
    Tokens h, r;
    for (std::size_t k = 0, n = 1 + uniform_index(rng, 8); k < n; ++k) h.push_back(alphabet[uniform_index(rng, 4)]);
    for (std::size_t k = 0, n = 1 + uniform_index(rng, 8); k < n; ++k) r.push_back(alphabet[uniform_index(rng, 4)]);
    const double l = static_cast<double>(lcs_oracle(h, r));
    double expect = 0.0;
    if (l > 0) {
      const double p = l / h.size(), rc = l / r.size();
      expect = (1 + 1.44) * p * rc / (rc + 1.44 * p);
    }
    ASSERT_EQ(rouge_l(h, {r}), expect);
    ASSERT_EQ(rouge_l(h, {r, r}), rouge_l(h, {r}));
  }
}

TEST(RougeL, MaxOverReferences) {
  EXPECT_DOUBLE_EQ(rouge_l(words("a b"), {words("x"), words("a b")}), 1.0);
}

TEST(Meteor, IdenticalSentenceHandValue) {
  for (std::size_t n : {1u, 3u, 5u}) {
    Tokens t;
    for (std::size_t k = 0; k < n; ++k) t.push_back("w" + std::to_string(k));
    const double frag = 1.0 / static_cast<double>(n);
    EXPECT_NEAR(meteor_lite(t, {t}), 1.0 - 0.5 * frag * frag * frag, 1e-15);
  }
}

TEST(Meteor, PartialMatchHandValue) {
  // the/sat match in 2 chunks: P = R = 2/3, Fmean = 2/3, penalty = 0.5.
  EXPECT_NEAR(meteor_lite(words("the cat sat"), {words("the dog sat")}), (2.0 / 3.0) * 0.5, 1e-15);
  // P = 1, R = 1/2: Fmean = 10 * 0.5 / (0.5 + 9) = 10/19, one chunk of 2.
  EXPECT_NEAR(meteor_lite(words("a b"), {words("a b c d")}), 10.0 / 19.0 * (1 - 0.5 / 8), 1e-15);
}

TEST(Meteor, StemMatchAligns) {
  const auto s = meteor_single(words("goals"), words("goal"));
  EXPECT_EQ(s.matches, 1u);
  EXPECT_NEAR(s.score, 0.5, 1e-15);
  EXPECT_EQ(stem("scoring"), "scor");
  EXPECT_EQ(stem("is"), "is");
}

TEST(Meteor, NoMatchesAndEmpty) {
  EXPECT_EQ(meteor_lite(words("x y"), {words("a b")}), 0.0);
  EXPECT_EQ(meteor_lite({}, {words("a b")}), 0.0);
  EXPECT_THROW(meteor_lite(words("a"), {}), ContractError);
}

TEST(Metrics, StayInUnitIntervalAndIgnoreDuplicateReferences) {
  Rng rng = make_rng(2, "metrics");
  const Tokens alphabet = {"goal", "goals", "save", "saved", "lol"};
  for (int t = 0; t < 300; ++t) {
    Tokens h, r;
    for (std::size_t k = 0, n = uniform_index(rng, 7); k < n; ++k) h.push_back(alphabet[uniform_index(rng, 5)]);
    for (std::size_t k = 0, n = 1 + uniform_index(rng, 7); k < n; ++k) r.push_back(alphabet[uniform_index(rng, 5)]);
    for (double v : {rouge_l(h, {r}), meteor_lite(h, {r})}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(meteor_lite(h, {r, r}), meteor_lite(h, {r}));
  }
}

TEST(Bootstrap, IdenticalRecordsGiveOne) {
  const std::vector<double> a = {1, 0, 1, 1, 0};
  EXPECT_EQ(bootstrap_significance(a, a, 1000, 1), 1.0);
}

TEST(Bootstrap, DominatingSystemGivesZero) {
  EXPECT_EQ(bootstrap_significance({1, 1, 1, 1}, {0, 0, 0, 0}, 1000, 1), 0.0);
}

TEST(Bootstrap, MatchesExactEnumerationOnThreeInstances) {
  // d = a - b = (1, 1, -1); enumerate all 27 equally likely resamples.
  const std::vector<double> d = {1, 1, -1};
  int not_better = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) not_better += d[i] + d[j] + d[k] <= 0;
  const double exact = not_better / 27.0;
  EXPECT_NEAR(bootstrap_significance({1, 1, 0}, {0, 0, 1}, 100000, 4), exact, 0.006);
}

TEST(Bootstrap, LengthMismatchThrows) {
  EXPECT_THROW(bootstrap_significance({1, 2}, {1}), ContractError);
}

}  // namespace
}  // namespace vidchat::eval
