#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "vidchat/numerics/errors.hpp"

namespace vidchat::eval {

using Tokens = std::vector<std::string>;

inline std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline constexpr double kRougeBeta = 1.2;

inline double rouge_l_single(const Tokens& hyp, const Tokens& ref, double beta = kRougeBeta) {
  if (hyp.empty() || ref.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(hyp, ref));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(hyp.size());
  const double r = lcs / static_cast<double>(ref.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

// Best ROUGE-L F over the references.
inline double rouge_l(const Tokens& hyp, const std::vector<Tokens>& refs, double beta = kRougeBeta) {
  if (refs.empty()) throw ContractError("rouge_l needs at least one reference");
  double best = 0.0;
  for (const auto& r : refs) best = std::max(best, rouge_l_single(hyp, r, beta));
  return best;
}

// Suffix stripper used for the second alignment stage.
inline std::string stem(std::string w) {
  std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const char* suf : {"ing", "ed", "es", "ly", "s"}) {
    const std::string s(suf);
    if (w.size() >= s.size() + 3 && w.compare(w.size() - s.size(), s.size(), s) == 0) {
      w.resize(w.size() - s.size());
      break;
    }
  }
  return w;
}

struct MeteorStats {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0, recall = 0.0, fmean = 0.0, penalty = 0.0, score = 0.0;
};

// Unigram alignment, exact matches first, then stem matches. Each
// hypothesis token takes the free reference token right after its
// predecessor's match when possible, otherwise the leftmost free one.
inline std::vector<long> meteor_alignment(const Tokens& hyp, const Tokens& ref) {
  std::vector<long> align(hyp.size(), -1);
  std::vector<bool> used(ref.size(), false);
  std::vector<std::string> hs, rs;
  for (const auto& t : hyp) hs.push_back(stem(t));
  for (const auto& t : ref) rs.push_back(stem(t));
  for (int stage = 0; stage < 2; ++stage) {
    auto same = [&](std::size_t i, std::size_t j) { return stage == 0 ? hyp[i] == ref[j] : hs[i] == rs[j]; };
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (align[i] >= 0) continue;
      long pick = -1;
      if (i > 0 && align[i - 1] >= 0) {
        const auto next = static_cast<std::size_t>(align[i - 1] + 1);
        if (next < ref.size() && !used[next] && same(i, next)) pick = static_cast<long>(next);
      }
      for (std::size_t j = 0; pick < 0 && j < ref.size(); ++j)
        if (!used[j] && same(i, j)) pick = static_cast<long>(j);
      if (pick >= 0) {
        align[i] = pick;
        used[static_cast<std::size_t>(pick)] = true;
      }
    }
  }
  return align;
}

inline MeteorStats meteor_single(const Tokens& hyp, const Tokens& ref) {
  MeteorStats s;
  if (hyp.empty() || ref.empty()) return s;
  const auto align = meteor_alignment(hyp, ref);
  long prev = -2;
  for (std::size_t i = 0; i < align.size(); ++i) {
    if (align[i] < 0) {
      prev = -2;
      continue;
    }
    ++s.matches;
    if (align[i] != prev + 1 || prev < 0) ++s.chunks;
    prev = align[i];
  }
  if (s.matches == 0) return s;
  const double m = static_cast<double>(s.matches);
  s.precision = m / static_cast<double>(hyp.size());
  s.recall = m / static_cast<double>(ref.size());
  s.fmean = 10.0 * s.precision * s.recall / (s.recall + 9.0 * s.precision);
  const double frag = static_cast<double>(s.chunks) / m;
  s.penalty = 0.5 * frag * frag * frag;
  s.score = s.fmean * (1.0 - s.penalty);
  return s;
}

// METEOR without paraphrase or synonym tables; best score over references.
inline double meteor_lite(const Tokens& hyp, const std::vector<Tokens>& refs) {
  if (refs.empty()) throw ContractError("meteor_lite needs at least one reference");
  double best = 0.0;
  for (const auto& r : refs) best = std::max(best, meteor_single(hyp, r).score);
  return best;
}

}  // namespace vidchat::eval
