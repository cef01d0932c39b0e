#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vidchat/corpus/bleu.hpp"
#include "vidchat/corpus/chat_log.hpp"
#include "vidchat/corpus/features.hpp"
#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/corpus/stats.hpp"
#include "vidchat/corpus/stopwords.hpp"
#include "vidchat/numerics/random.hpp"

namespace vidchat::corpus {
namespace {

using Tokens = std::vector<std::string>;

Tokens split(const std::string& s) {
  std::istringstream is(s);
  Tokens out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

Utterance utt(const std::string& speaker, double t, const std::string& text) {
  return {speaker, t, split(text)};
}

// Straight-line BLEU (add-one on orders >= 2): n-grams as joined strings,
// clipping by consuming reference occurrences one at a time.
double bleu_oracle(const Tokens& h, const Tokens& r) {
  auto grams = [](const Tokens& t, std::size_t n) {
    std::vector<std::string> g;
    for (std::size_t i = 0; i + n <= t.size(); ++i) {
      std::string s;
      for (std::size_t k = 0; k < n; ++k) s += t[i + k] + "\x1f";
      g.push_back(s);
    }
    return g;
  };
  double logp = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto hg = grams(h, n), rg = grams(r, n);
    std::vector<bool> used(rg.size(), false);
    int matched = 0;
    for (const auto& g : hg) {
      for (std::size_t k = 0; k < rg.size(); ++k) {
        if (!used[k] && rg[k] == g) {
          used[k] = true;
          ++matched;
          break;
        }
      }
    }
    if (n == 1 && matched == 0) return 0.0;
    const double p = n == 1 ? matched / static_cast<double>(hg.size())
                            : (matched + 1.0) / (static_cast<double>(hg.size()) + 1.0);
    logp += std::log(p);
  }
  const double bp = h.size() < r.size() ? std::exp(1.0 - double(r.size()) / double(h.size())) : 1.0;
  return bp * std::exp(logp / 4.0);
}

// ------------------------------------------------------------------ tokenizer

TEST(Tokenizer, GoldenCases) {
  EXPECT_EQ(tokenize("GOAL!!"), (Tokens{"goal", "!", "!"}));
  EXPECT_EQ(tokenize("what a save @Bob :) <3"), (Tokens{"what", "a", "save", "@bob", ":)", "<3"}));
  EXPECT_EQ(tokenize("don't  stop,PogChamp"), (Tokens{"don't", "stop", ",", "pogchamp"}));
  EXPECT_EQ(tokenize("  "), Tokens{});
  EXPECT_EQ(tokenize("xD"), (Tokens{"xD"}));
  EXPECT_EQ(tokenize("xDD"), (Tokens{"xdd"}));
}

TEST(ChatLog, ParsesTokenizesAndSorts) {
  std::istringstream in(
      R"({"time":3.0,"user":"b","text":"nice"})"
      "\n"
      R"({"time":1.0,"user":"a","text":"GOAL!!"})"
      "\n\n"
      R"({"time":2.0,"user":"c","text":"see http://x.y lol"})"
      "\n");
  auto log = parse_chat_log(in);
  ASSERT_EQ(log.utterances.size(), 2u);
  EXPECT_EQ(log.utterances[0], (Utterance{"a", 1.0, {"goal", "!", "!"}}));
  EXPECT_EQ(log.utterances[1].speaker, "b");
  EXPECT_EQ(log.out_of_order, 1u);
  EXPECT_EQ(log.dropped_urls, 1u);
}

TEST(ChatLog, EmptyStreamGivesEmptyList) {
  std::istringstream in("");
  EXPECT_TRUE(parse_chat_log(in).utterances.empty());
}

TEST(ChatLog, MalformedLineReportsLineNumber) {
  std::istringstream in(R"({"time":1.0,"user":"a","text":"ok"})"
                        "\n{not json\n");
  try {
    parse_chat_log(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

// ------------------------------------------------------------------ anonymize

TEST(Anonymize, MentionsAndKnownIds) {
  std::set<std::string> known = {"bob"};
  EXPECT_EQ(anonymize(utt("x", 0, "nice @bob"), known).tokens, (Tokens{"nice", "<USER>"}));
  EXPECT_EQ(anonymize(utt("x", 0, "nice goal"), known).tokens, (Tokens{"nice", "goal"}));
  EXPECT_EQ(anonymize(utt("x", 0, "bob bob"), known).tokens, (Tokens{"<USER>", "<USER>"}));
}

// ------------------------------------------------------------------ windows

TEST(Windows, SixtySecondsGivesTwoInstances) {
  PipelineConfig cfg;
  auto w = segment_windows(60.0, cfg);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], (WindowPair{{0, 20}, {20, 30}}));
  EXPECT_EQ(w[1], (WindowPair{{30, 50}, {50, 60}}));
}

TEST(Windows, BoundaryAndTooShort) {
  PipelineConfig cfg;
  EXPECT_EQ(segment_windows(59.9, cfg).size(), 1u);
  EXPECT_TRUE(segment_windows(29.0, cfg).empty());
}

TEST(Windows, ResponsesNeverOverlapNextContext) {
  PipelineConfig cfg;
  auto w = segment_windows(1000.0, cfg);
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    EXPECT_LE(w[k].response.end, w[k + 1].context.begin);
    EXPECT_EQ(w[k].context.end, w[k].response.begin);
  }
}

// ------------------------------------------------------------------ BLEU

TEST(Bleu, IdenticalSentencesScoreOne) {
  Tokens s = split("a b c d e");
  EXPECT_DOUBLE_EQ(compute_bleu4(s, s, BleuSmoothing::none), 1.0);
  EXPECT_DOUBLE_EQ(compute_bleu4(s, s, BleuSmoothing::add_one), 1.0);
  EXPECT_DOUBLE_EQ(bleu_oracle(s, s), 1.0);
}

TEST(Bleu, FrozenValues) {
  // Values from a separate Python implementation of the same definition.
  EXPECT_NEAR(compute_bleu4(split("the cat sat on mat"), split("the cat sat on the mat")), 0.6511126026643229, 1e-12);
  EXPECT_NEAR(compute_bleu4(split("the cat sat on mat"), split("the cat sat on the mat"), BleuSmoothing::none),
              0.5789300674674098, 1e-12);
  EXPECT_EQ(compute_bleu4(split("goal goal goal"), split("nice")), 0.0);
  EXPECT_NEAR(compute_bleu4(split("what a goal"), split("what a goal by messi")), 0.513417119032592, 1e-12);
  EXPECT_NEAR(compute_bleu4(split("nice goal"), split("goal")), 0.7071067811865476, 1e-12);
  EXPECT_NEAR(compute_bleu4(split("goal goal goal"), split("nice"), BleuSmoothing::add_one_all), 0.4518010018049224,
              1e-12);
  EXPECT_NEAR(compute_bleu4(split("referee blind"), split("gg"), BleuSmoothing::add_one_all), 0.6389431042462724,
              1e-12);
}

TEST(Bleu, NoSharedUnigramsFallsBelowFloor) {
  EXPECT_LT(compute_bleu4(split("referee blind"), split("gg")), 0.05);
  Tokens h, r;
  for (int i = 0; i < 30; ++i) {
    h.push_back("w" + std::to_string(i));
    r.push_back("v" + std::to_string(i));
  }
  EXPECT_LT(compute_bleu4(h, r), 0.05);
  // Smoothing every order only gets under the floor for long sentences.
  EXPECT_NEAR(compute_bleu4(h, r, BleuSmoothing::add_one_all), 0.03392268780792677, 1e-12);
}

TEST(Bleu, ShortHypothesisGetsBrevityPenalty) {
  const double full = compute_bleu4(split("a b c d"), split("a b c d"));
  const double shorter = compute_bleu4(split("a b c"), split("a b c d"));
  EXPECT_LT(shorter, full);
  EXPECT_NEAR(shorter, std::exp(1.0 - 4.0 / 3.0), 1e-12);  // all clipped precisions are 1
}

TEST(Bleu, EmptyInputIsContractError) {
  EXPECT_THROW(compute_bleu4({}, split("a")), ContractError);
  EXPECT_THROW(compute_bleu4(split("a"), {}), ContractError);
}

TEST(Bleu, AgreesWithOracleOnFiftyFixtures) {
  Rng rng = make_rng(99, "bleu");
  const Tokens vocab = split("goal nice save wow kappa lol the a what shot");
  for (int i = 0; i < 50; ++i) {
    Tokens h(1 + uniform_index(rng, 8)), r(1 + uniform_index(rng, 8));
    for (auto& w : h) w = vocab[uniform_index(rng, vocab.size())];
    for (auto& w : r) w = vocab[uniform_index(rng, vocab.size())];
    EXPECT_NEAR(compute_bleu4(h, r), bleu_oracle(h, r), 1e-12) << i;
  }
}

// ------------------------------------------------------------------ frequent set

TEST(Frequent, RepeatedUtteranceAndSmallCorpus) {
  std::vector<Utterance> one(5, utt("a", 0, "gg"));
  EXPECT_EQ(top_frequent_utterances(one), (std::set<std::string>{"gg"}));
  std::vector<Utterance> few = {utt("a", 0, "x"), utt("a", 0, "y"), utt("a", 0, "z")};
  EXPECT_EQ(top_frequent_utterances(few).size(), 3u);
}

TEST(Frequent, TieAtCutoffKeepsLexicographicallySmaller) {
  std::vector<Utterance> u = {utt("a", 0, "b"), utt("a", 0, "c"), utt("a", 0, "a"), utt("a", 0, "d"),
                              utt("a", 0, "d")};
  EXPECT_EQ(top_frequent_utterances(u, 2), (std::set<std::string>{"d", "a"}));
}

// ------------------------------------------------------------------ selection

TEST(SelectResponse, FirstBleuMatchWins) {
  PipelineConfig cfg;
  std::vector<Utterance> w = {utt("x", 20, "goal goal goal"), utt("y", 21, "nice"), utt("z", 22, "goal goal goal")};
  auto s = select_response(w, {}, cfg);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->index, 0u);
  EXPECT_EQ(s->reason, SelectionReason::bleu_match);
}

TEST(SelectResponse, NoMatchFallsBackToFirst) {
  PipelineConfig cfg;
  std::vector<Utterance> w = {utt("x", 20, "what a shot that was"), utt("y", 21, "referee blind"),
                              utt("z", 22, "lag again on stream")};
  auto s = select_response(w, {}, cfg);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->index, 0u);
  EXPECT_EQ(s->reason, SelectionReason::fallback_first);
}

TEST(SelectResponse, EmptyWindowGivesNone) {
  EXPECT_FALSE(select_response({}, {}, PipelineConfig{}));
}

TEST(SelectResponse, FrequentOnlyWhenNothingElseMatches) {
  PipelineConfig cfg;
  std::set<std::string> frequent = {"gg"};
  // Only the frequent utterance has a partner: chosen in the second pass.
  std::vector<Utterance> w1 = {utt("x", 20, "referee blind"), utt("y", 21, "gg"), utt("z", 22, "gg")};
  auto s1 = select_response(w1, frequent, cfg);
  ASSERT_TRUE(s1);
  EXPECT_EQ(s1->index, 1u);
  EXPECT_EQ(s1->reason, SelectionReason::bleu_match);
  // A later non-frequent match beats an earlier frequent one.
  std::vector<Utterance> w2 = {utt("x", 20, "gg"), utt("y", 21, "gg"), utt("z", 22, "what a goal"),
                               utt("w", 23, "what a goal")};
  auto s2 = select_response(w2, frequent, cfg);
  ASSERT_TRUE(s2);
  EXPECT_EQ(s2->index, 2u);
}

TEST(SelectResponse, NeverFrequentWhenNonFrequentMatches) {
  PipelineConfig cfg;
  Rng rng = make_rng(5, "select");
  std::vector<std::string> phrases = {"gg", "what a goal", "nice save", "kappa", "lol", "what a save", "gg wp"};
  std::set<std::string> frequent = {"gg", "kappa"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Utterance> w(1 + uniform_index(rng, 6));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = utt("s", 20 + i, phrases[uniform_index(rng, phrases.size())]);
    auto s = select_response(w, frequent, cfg);
    ASSERT_TRUE(s);
    bool nonfrequent_match = false;
    for (std::size_t i = 0; i < w.size() && !nonfrequent_match; ++i) {
      if (frequent.count(join_tokens(w[i].tokens))) continue;
      for (std::size_t j = 0; j < w.size(); ++j)
        if (j != i && compute_bleu4(w[i].tokens, w[j].tokens) >= cfg.bleu_threshold) nonfrequent_match = true;
    }
    if (nonfrequent_match) EXPECT_EQ(frequent.count(join_tokens(s->tokens)), 0u);
  }
}

TEST(OutOfContext, ResponseMentioningAbsentSpeakerDropped) {
  std::vector<Utterance> w = {utt("x", 20, "carol is wrong"), utt("y", 21, "@dave lol"), utt("z", 22, "bob yes")};
  auto kept = drop_out_of_context_mentions(w, {"bob", "carol", "x", "y", "z"}, {"bob", "x"});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].speaker, "z");
}

// ------------------------------------------------------------------ build_triples

FeatureMatrix ramp_features(std::uint32_t rows, std::uint32_t cols) {
  FeatureMatrix m{rows, cols, {}};
  for (std::uint32_t i = 0; i < rows * cols; ++i) m.data.push_back(static_cast<float>(i) * 0.5f);
  return m;
}

std::vector<Utterance> sixty_second_log() {
  std::vector<Utterance> u;
  for (int base : {0, 30}) {
    for (int k = 0; k < 5; ++k) u.push_back(utt("s" + std::to_string(k), base + 2.0 * k + 1, "context words here"));
    u.push_back(utt("r1", base + 21.0, "what a goal"));
    u.push_back(utt("r2", base + 23.0, "what a goal"));
  }
  return u;
}

TEST(BuildTriples, SixtySecondFixtureGivesTwoTriples) {
  MemoryFrameStore store;
  store.put("v", ramp_features(180, 4));
  PipelineConfig cfg;
  auto triples = build_triples("v", sixty_second_log(), store, cfg, {});
  ASSERT_EQ(triples.size(), 2u);
  EXPECT_EQ(triples[0].context_interval, (Interval{0, 20}));
  EXPECT_EQ(triples[0].response_interval, (Interval{20, 30}));
  EXPECT_EQ(triples[1].context_interval, (Interval{30, 50}));
  EXPECT_EQ(triples[1].response_interval, (Interval{50, 60}));
  for (const auto& t : triples) {
    EXPECT_GE(t.chat.size(), cfg.min_context_utts);
    EXPECT_EQ(t.video.num_frames(), 60u);
    EXPECT_EQ(t.response_tokens, split("what a goal"));
    EXPECT_EQ(t.selection_reason, SelectionReason::bleu_match);
    EXPECT_GE(t.chat.front().time, t.context_interval.begin);
  }
  EXPECT_EQ(triples[1].video.row_begin, 90u);
  EXPECT_EQ(triples[1].video.frames[0], 90.0f * 4 * 0.5f);
}

TEST(BuildTriples, ThreeUtteranceContextExcluded) {
  MemoryFrameStore store;
  store.put("v", ramp_features(180, 4));
  auto log = sixty_second_log();
  log.erase(log.begin(), log.begin() + 2);  // first window keeps 3 context utterances
  auto triples = build_triples("v", log, store, PipelineConfig{}, {});
  ASSERT_EQ(triples.size(), 1u);
  EXPECT_EQ(triples[0].window_index, 1u);
}

TEST(BuildTriples, EmptyResponseWindowExcluded) {
  MemoryFrameStore store;
  store.put("v", ramp_features(180, 4));
  auto log = sixty_second_log();
  std::erase_if(log, [](const Utterance& u) { return u.time >= 50.0; });
  auto triples = build_triples("v", log, store, PipelineConfig{}, {});
  ASSERT_EQ(triples.size(), 1u);
  EXPECT_EQ(triples[0].window_index, 0u);
}

TEST(BuildTriples, MissingFeaturesNameTheInterval) {
  MemoryFrameStore store;
  store.put("v", ramp_features(90, 4));  // covers only the first 30 s
  auto log = sixty_second_log();
  log.push_back(utt("late", 60.0, "bye"));
  try {
    build_triples("v", log, store, PipelineConfig{}, {});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("[30,50)"), std::string::npos) << e.what();
  }
}

TEST(BuildTriples, ContextSpeakersAnonymized) {
  MemoryFrameStore store;
  store.put("v", ramp_features(180, 4));
  auto log = sixty_second_log();
  log[0].tokens = split("s1 and @zed said so");
  auto triples = build_triples("v", log, store, PipelineConfig{}, {});
  EXPECT_EQ(triples[0].chat[0].tokens, split("<USER> and <USER> said so"));
}

TEST(BuildTriples, SerializationIsDeterministicAndRoundTrips) {
  MemoryFrameStore store;
  store.put("v", ramp_features(180, 4));
  auto dump = [&] {
    std::ostringstream os;
    write_triples(os, build_triples("v", sixty_second_log(), store, PipelineConfig{}, {}));
    return os.str();
  };
  const std::string a = dump();
  EXPECT_EQ(a, dump());
  std::istringstream is(a);
  auto back = read_triples(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].video.row_begin, 90u);
  EXPECT_EQ(back[1].video.row_end, 150u);
  EXPECT_EQ(back[0].response_tokens, split("what a goal"));
  std::ostringstream again;
  write_triples(again, back);
  EXPECT_EQ(a, again.str());
}

TEST(Vfea, RoundTripAndBadMagic) {
  FeatureMatrix m = ramp_features(3, 2);
  std::stringstream ss;
  write_vfea(ss, m);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 8u + 24u);
  EXPECT_EQ(bytes.substr(0, 4), "VFEA");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3u);  // little-endian rows
  EXPECT_EQ(read_vfea(ss), m);
  std::istringstream bad("XXXX");
  EXPECT_THROW(read_vfea(bad), DataError);
}

// ------------------------------------------------------------------ stats

DialogueTriple triple_with(std::vector<std::size_t> utt_lengths, std::size_t response_len) {
  DialogueTriple t;
  for (auto n : utt_lengths) t.chat.push_back({"s", 0.0, Tokens(n, "goal")});
  t.response_tokens = Tokens(response_len, "save");
  return t;
}

TEST(Stats, SingleTripleAverages) {
  auto r = corpus_stats({triple_with({4, 6}, 5)});
  EXPECT_EQ(r.instances, 1u);
  EXPECT_DOUBLE_EQ(r.avg_context_words, 10.0);
  EXPECT_DOUBLE_EQ(r.avg_response_words, 5.0);
}

TEST(Stats, EmptySetIsZeroed) {
  auto r = corpus_stats({});
  EXPECT_EQ(r.instances, 0u);
  EXPECT_EQ(r.avg_context_words, 0.0);
  EXPECT_TRUE(r.utterances_per_context.empty());
  EXPECT_TRUE(r.top_words.empty());
}

TEST(Stats, HandCountedHistogramAndTopWords) {
  auto a = triple_with({1, 1, 1, 1}, 1);
  auto b = triple_with({2, 2, 2, 2}, 2);
  auto c = triple_with({1, 1, 1, 1, 1}, 3);
  c.chat[0].tokens = split("the goal <USER> !");
  auto r = corpus_stats({a, b, c});
  EXPECT_EQ(r.utterances_per_context, (std::map<std::size_t, std::size_t>{{4, 2}, {5, 1}}));
  // goal: 4 + 8 + 4(rows 1..4) + 1 = 17; save: 1 + 2 + 3 = 6; "the", "<USER>", "!" excluded.
  ASSERT_EQ(r.top_words.size(), 2u);
  EXPECT_EQ(r.top_words[0], (std::pair<std::string, std::size_t>{"goal", 17}));
  EXPECT_EQ(r.top_words[1], (std::pair<std::string, std::size_t>{"save", 6}));
  EXPECT_DOUBLE_EQ(r.avg_context_words, (4.0 + 8.0 + 8.0) / 3.0);
}

TEST(Stopwords, HeaderMatchesDataFile) {
  std::ifstream in(VIDCHAT_DATA_DIR "/stopwords_en.txt");
  ASSERT_TRUE(in);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  ASSERT_EQ(words.size(), kStopwords.size());
  for (std::size_t i = 0; i < words.size(); ++i) EXPECT_EQ(words[i], kStopwords[i]);
}

}  // namespace
}  // namespace vidchat::corpus
