#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace vidchat::corpus {

// Emoticons kept as single tokens (case preserved for letters like ":D").
inline constexpr std::array<std::string_view, 14> kEmoticons = {
    "<3", ":-)", ":-(", ":)", ":(", ":D", ":P", ":p", ";)", ":o", ":O", "xD", "XD", ":/"};

inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool contains_url(std::string_view text) {
  const std::string lower = to_lower(text);
  return lower.find("http://") != std::string::npos || lower.find("https://") != std::string::npos ||
         lower.find("www.") != std::string::npos;
}

// Lowercases and splits on whitespace and punctuation. Word characters are
// alphanumerics, '_' and any non-ASCII byte (so emoji and accented words stay
// whole); an inner apostrophe joins a word ("don't"); "@name" stays one token;
// emoticons from kEmoticons survive intact; any other punctuation byte is its
// own token.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto emoticon_at = [&](std::size_t pos) -> std::size_t {
    for (auto e : kEmoticons) {
      if (text.substr(pos, e.size()) != e) continue;
      const std::size_t end = pos + e.size();
      // An emoticon that runs into a word ("xDD", ":Pog") is not an emoticon.
      if (end < n && is_word_byte(static_cast<unsigned char>(text[end]))) continue;
      if (pos > 0 && is_word_byte(static_cast<unsigned char>(text[pos - 1]))) continue;
      return e.size();
    }
    return 0;
  };
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::size_t len = emoticon_at(i)) {
      out.emplace_back(text.substr(i, len));
      i += len;
      continue;
    }
    if (is_word_byte(c) || (c == '@' && i + 1 < n && is_word_byte(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i + 1;
      while (j < n) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (is_word_byte(d)) {
          ++j;
        } else if (d == '\'' && j + 1 < n && is_word_byte(static_cast<unsigned char>(text[j + 1])) &&
                   text[i] != '@') {
          ++j;
        } else {
          break;
        }
      }
      out.push_back(to_lower(text.substr(i, j - i)));
      i = j;
      continue;
    }
    out.emplace_back(1, static_cast<char>(c));
    ++i;
  }
  return out;
}

// Normalized utterance string: tokens joined by single spaces.
inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

}  // namespace vidchat::corpus
