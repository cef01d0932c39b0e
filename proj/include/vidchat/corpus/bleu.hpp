#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "vidchat/numerics/errors.hpp"

namespace vidchat::corpus {

// add_one: (matches+1)/(total+1) on orders 2..4, unigram precision unsmoothed,
// so disjoint sentences score 0 and short ones are not zeroed by a missing
// 4-gram. add_one_all also smooths unigrams; any two-token hypothesis then
// scores at least 0.64 against anything.
enum class BleuSmoothing { none, add_one, add_one_all };

inline std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& toks,
                                                           std::size_t n) {
  std::map<std::vector<std::string>, int> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  }
  return counts;
}

// Sentence-level BLEU-4: geometric mean of clipped 1..4-gram precisions
// times the brevity penalty exp(1 - |ref|/|hyp|) for short hypotheses.
inline double compute_bleu4(const std::vector<std::string>& hyp, const std::vector<std::string>& ref,
                            BleuSmoothing smoothing = BleuSmoothing::add_one) {
  if (hyp.empty() || ref.empty()) throw ContractError("compute_bleu4: empty hypothesis or reference");
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto h = ngram_counts(hyp, n);
    const auto r = ngram_counts(ref, n);
    int matches = 0;
    int total = 0;
    for (const auto& [gram, c] : h) {
      total += c;
      auto it = r.find(gram);
      if (it != r.end()) matches += std::min(c, it->second);
    }
    double p;
    const bool smooth = smoothing == BleuSmoothing::add_one_all || (smoothing == BleuSmoothing::add_one && n > 1);
    if (smooth) {
      p = (matches + 1.0) / (total + 1.0);
    } else {
      if (matches == 0) return 0.0;
      p = static_cast<double>(matches) / total;
    }
    log_sum += std::log(p);
  }
  const double hl = static_cast<double>(hyp.size());
  const double rl = static_cast<double>(ref.size());
  const double bp = hl < rl ? std::exp(1.0 - rl / hl) : 1.0;
  return bp * std::exp(log_sum / 4.0);
}

}  // namespace vidchat::corpus
