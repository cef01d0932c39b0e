#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/corpus/stopwords.hpp"

namespace vidchat::corpus {

struct StatsReport {
  std::size_t instances = 0;
  double avg_context_words = 0.0;
  double avg_response_words = 0.0;
  std::map<std::size_t, std::size_t> utterances_per_context;  // #utterances -> #instances
  std::vector<std::pair<std::string, std::size_t>> top_words;   // non-stopwords, descending
};

// Counted words exclude stopwords, reserved tags and pure punctuation.
inline bool is_content_word(const std::string& w) {
  if (w.empty() || w.front() == '<' || is_stopword(w)) return false;
  return std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; });
}

inline StatsReport corpus_stats(const std::vector<DialogueTriple>& triples, std::size_t top_n = 20) {
  StatsReport r;
  r.instances = triples.size();
  if (triples.empty()) return r;
  std::map<std::string, std::size_t> freq;
  std::size_t ctx_words = 0, resp_words = 0;
  for (const auto& t : triples) {
    ++r.utterances_per_context[t.chat.size()];
    for (const auto& u : t.chat) {
      ctx_words += u.tokens.size();
      for (const auto& w : u.tokens)
        if (is_content_word(w)) ++freq[w];
    }
    resp_words += t.response_tokens.size();
    for (const auto& w : t.response_tokens)
      if (is_content_word(w)) ++freq[w];
  }
  r.avg_context_words = static_cast<double>(ctx_words) / triples.size();
  r.avg_response_words = static_cast<double>(resp_words) / triples.size();
  r.top_words.assign(freq.begin(), freq.end());
  std::stable_sort(r.top_words.begin(), r.top_words.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (r.top_words.size() > top_n) r.top_words.resize(top_n);
  return r;
}

inline void to_json(nlohmann::json& j, const StatsReport& r) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, v] : r.utterances_per_context) hist[std::to_string(k)] = v;
  nlohmann::json top = nlohmann::json::array();
  for (const auto& [w, c] : r.top_words) top.push_back({w, c});
  j = nlohmann::json{{"instances", r.instances},
                     {"avg_context_words", r.avg_context_words},
                     {"avg_response_words", r.avg_response_words},
                     {"utterances_per_context", hist},
                     {"top_words", top}};
}

}  // namespace vidchat::corpus
