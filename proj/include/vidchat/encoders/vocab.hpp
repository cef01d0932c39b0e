#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/numerics/ops.hpp"
#include "vidchat/numerics/parameters.hpp"

namespace vidchat::encoders {

inline constexpr std::size_t kPad = 0;
inline constexpr std::size_t kUnk = 1;
inline constexpr std::size_t kBos = 2;
inline constexpr std::size_t kEos = 3;
inline constexpr std::size_t kUser = 4;
inline constexpr std::size_t kSep = 5;
inline constexpr std::size_t kNumReserved = 6;

inline const std::array<std::string, kNumReserved> kReservedTokens = {"<PAD>", "<UNK>", "<BOS>",
                                                                       "<EOS>", "<USER>", "<SEP>"};

class Vocab {
 public:
  Vocab() {
    for (const auto& t : kReservedTokens) add(t);
  }

  explicit Vocab(const std::vector<std::string>& tokens) {
    if (tokens.size() < kNumReserved ||
        !std::equal(kReservedTokens.begin(), kReservedTokens.end(), tokens.begin())) {
      throw ConfigError("vocab must start with the reserved tokens");
    }
    for (const auto& t : tokens) add(t);
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  bool contains(const std::string& tok) const { return index_.count(tok) > 0; }

  std::size_t id(const std::string& tok) const {
    auto it = index_.find(tok);
    return it == index_.end() ? kUnk : it->second;
  }

  std::vector<std::size_t> ids(const std::vector<std::string>& toks) const {
    std::vector<std::size_t> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(id(t));
    return out;
  }

  void add(const std::string& tok) {
    if (index_.emplace(tok, tokens_.size()).second) tokens_.push_back(tok);
  }

  bool operator==(const Vocab& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Most frequent chat and response tokens of the training triples; ties are
// broken lexicographically. max_size counts the reserved entries.
inline Vocab build_vocab(const std::vector<corpus::DialogueTriple>& training_triples,
                         std::size_t max_size = 27000) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : training_triples) {
    for (const auto& u : t.chat)
      for (const auto& w : u.tokens) ++counts[w];
    for (const auto& w : t.response_tokens) ++counts[w];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [w, c] : counts) {
    if (std::find(kReservedTokens.begin(), kReservedTokens.end(), w) == kReservedTokens.end()) {
      ranked.emplace_back(w, c);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  for (const auto& [w, _] : ranked) {
    if (v.size() >= max_size) break;
    v.add(w);
  }
  return v;
}

// |V| x d_emb lookup table living in a ParameterStore.
struct EmbeddingTable {
  Vocab vocab;
  Tensor matrix;

  static EmbeddingTable create(ParameterStore& store, const std::string& name, Vocab vocab, std::size_t dim) {
    EmbeddingTable t;
    t.matrix = store.create(name, {vocab.size(), dim});
    t.vocab = std::move(vocab);
    return t;
  }

  std::size_t dim() const { return matrix.shape()[1]; }

  // T x d_emb rows for the given ids.
  Tensor lookup(const std::vector<std::size_t>& ids) const { return gather_rows(matrix, ids); }
  Tensor lookup(const std::vector<std::string>& toks) const { return lookup(vocab.ids(toks)); }
};

// Overwrites rows from a text file of "token v1 ... v_d" lines. Tokens not
// in the vocabulary are ignored. Returns the number of rows replaced.
inline std::size_t load_pretrained_embeddings(std::istream& in, const EmbeddingTable& table) {
  std::string line;
  std::size_t replaced = 0;
  std::size_t lineno = 0;
  const std::size_t d = table.dim();
  auto w = table.matrix.mutable_data();
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    std::vector<double> vals;
    for (double x; ls >> x;) vals.push_back(x);
    if (vals.size() != d) {
      throw ConfigError("embedding file line " + std::to_string(lineno) + ": dimension " +
                        std::to_string(vals.size()) + " != " + std::to_string(d));
    }
    if (!table.vocab.contains(tok)) continue;
    std::copy(vals.begin(), vals.end(), w.begin() + table.vocab.id(tok) * d);
    ++replaced;
  }
  return replaced;
}

// Chat context as one flat sequence: utterances in time order separated by
// <SEP>, truncated to the most recent `cap` tokens.
inline std::vector<std::string> concat_chat_context(const std::vector<corpus::Utterance>& utterances,
                                                    std::size_t cap = 70) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    if (i) out.push_back(kReservedTokens[kSep]);
    out.insert(out.end(), utterances[i].tokens.begin(), utterances[i].tokens.end());
  }
  if (out.size() > cap) out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(cap));
  return out;
}

}  // namespace vidchat::encoders
