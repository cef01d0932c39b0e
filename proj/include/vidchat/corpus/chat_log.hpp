#pragma once

#include <algorithm>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidchat/corpus/tokenizer.hpp"
#include "vidchat/numerics/errors.hpp"

namespace vidchat::corpus {

struct Utterance {
  std::string speaker;
  double time = 0.0;
  std::vector<std::string> tokens;

  bool operator==(const Utterance&) const = default;
};

struct ChatLog {
  std::vector<Utterance> utterances;
  std::size_t out_of_order = 0;  // lines whose time was earlier than the previous line
  std::size_t dropped_urls = 0;
  std::size_t dropped_empty = 0;
};

// JSON Lines, one {"time","user","text"} object per line. Blank lines are
// skipped. Utterances carrying a hyperlink or tokenizing to nothing are
// dropped. Output is stably sorted by time.
inline ChatLog parse_chat_log(std::istream& in) {
  ChatLog log;
  std::string line;
  std::size_t lineno = 0;
  double prev = -1.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double time = 0.0;
    std::string user, text;
    try {
      auto j = nlohmann::json::parse(line);
      time = j.at("time").get<double>();
      user = j.at("user").get<std::string>();
      text = j.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("chat log line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!(time >= 0.0)) {
      throw DataError("chat log line " + std::to_string(lineno) + ": negative or NaN time");
    }
    if (time < prev) ++log.out_of_order;
    prev = time;
    if (contains_url(text)) {
      ++log.dropped_urls;
      continue;
    }
    auto tokens = tokenize(text);
    if (tokens.empty()) {
      ++log.dropped_empty;
      continue;
    }
    log.utterances.push_back({user, time, std::move(tokens)});
  }
  std::stable_sort(log.utterances.begin(), log.utterances.end(),
                   [](const Utterance& a, const Utterance& b) { return a.time < b.time; });
  return log;
}

inline void to_json(nlohmann::json& j, const Utterance& u) {
  j = nlohmann::json{{"speaker", u.speaker}, {"time", u.time}, {"tokens", u.tokens}};
}

inline void from_json(const nlohmann::json& j, Utterance& u) {
  j.at("speaker").get_to(u.speaker);
  j.at("time").get_to(u.time);
  j.at("tokens").get_to(u.tokens);
}

}  // namespace vidchat::corpus
