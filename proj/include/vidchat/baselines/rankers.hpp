#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "vidchat/baselines/lm.hpp"
#include "vidchat/models/registry.hpp"

namespace vidchat::baselines {

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("cosine: vectors of different length");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

// Candidate order (indices) by descending score, ties by index.
inline std::vector<std::size_t> rank_by_scores(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Scores that reproduce a given order under the index tie-break.
inline std::vector<double> scores_from_order(const std::vector<std::size_t>& order) {
  std::vector<double> s(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) s[order[pos]] = -static_cast<double>(pos);
  return s;
}

inline std::string normalized_text(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    for (unsigned char c : t) s += static_cast<char>(std::tolower(c));
  }
  return s;
}

using ResponseCounts = std::map<std::string, std::size_t>;

inline ResponseCounts count_responses(const models::Dataset& train) {
  ResponseCounts c;
  for (const auto& e : train) ++c[normalized_text(e.response_tokens)];
  return c;
}

// Descending training frequency, ties in lexicographic order of the text.
inline std::vector<std::size_t> most_frequent_rank(const std::vector<std::string>& candidates,
                                                   const ResponseCounts& counts) {
  auto count = [&](const std::string& s) {
    auto it = counts.find(s);
    return it == counts.end() ? std::size_t{0} : it->second;
  };
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = count(candidates[a]), cb = count(candidates[b]);
    return ca != cb ? ca > cb : candidates[a] < candidates[b];
  });
  return order;
}

inline std::vector<double> cosine_scores(const std::vector<double>& context,
                                         const std::vector<std::vector<double>>& candidates) {
  std::vector<double> s;
  for (const auto& c : candidates) s.push_back(cosine(context, c));
  return s;
}

// Mean cosine of each candidate to the responses of the K training
// contexts closest to the query context.
inline std::vector<double> nearest_neighbor_scores(const std::vector<double>& context,
                                                   const std::vector<std::vector<double>>& candidates,
                                                   const std::vector<std::vector<double>>& train_contexts,
                                                   const std::vector<std::vector<double>>& train_responses,
                                                   std::size_t k) {
  if (train_contexts.size() != train_responses.size()) throw ContractError("nearest neighbor: unpaired training set");
  if (k == 0 || k > train_contexts.size()) throw ConfigError("nearest neighbor: K must be in [1, |train|]");
  const auto near = rank_by_scores(cosine_scores(context, train_contexts));
  std::vector<double> s;
  for (const auto& c : candidates) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += cosine(c, train_responses[near[i]]);
    s.push_back(total / static_cast<double>(k));
  }
  return s;
}

// Scorer adapters for the retrieval harness.
inline models::Scorer most_frequent_scorer(const models::Dataset& data, ResponseCounts counts) {
  // Candidate texts come from the dataset the lists are drawn from.
  std::map<const std::vector<std::size_t>*, std::string> text;
  for (const auto& e : data) text[&e.response] = normalized_text(e.response_tokens);
  return [text = std::move(text), counts = std::move(counts)](
             const models::Example&, const std::vector<const std::vector<std::size_t>*>& rs) {
    std::vector<std::string> cands;
    for (const auto* r : rs) cands.push_back(text.at(r));
    return scores_from_order(most_frequent_rank(cands, counts));
  };
}

inline models::Scorer cosine_scorer(const LanguageModel& lm) {
  return [&lm](const models::Example& ctx, const std::vector<const std::vector<std::size_t>*>& rs) {
    std::vector<std::vector<double>> reps;
    for (const auto* r : rs) reps.push_back(lm.represent(*r));
    return cosine_scores(lm.represent(ctx.chat), reps);
  };
}

struct NearestNeighborIndex {
  std::vector<std::vector<double>> contexts, responses;
  std::size_t k = 5;
};

inline NearestNeighborIndex build_nn_index(const LanguageModel& lm, const models::Dataset& train, std::size_t k = 5) {
  NearestNeighborIndex idx;
  idx.k = k;
  for (const auto& e : train) {
    idx.contexts.push_back(lm.represent(e.chat));
    idx.responses.push_back(lm.represent(e.response));
  }
  return idx;
}

inline models::Scorer nearest_neighbor_scorer(const LanguageModel& lm, NearestNeighborIndex idx) {
  return [&lm, idx = std::move(idx)](const models::Example& ctx,
                                     const std::vector<const std::vector<std::size_t>*>& rs) {
    std::vector<std::vector<double>> reps;
    for (const auto* r : rs) reps.push_back(lm.represent(*r));
    return nearest_neighbor_scores(lm.represent(ctx.chat), reps, idx.contexts, idx.responses, idx.k);
  };
}

}  // namespace vidchat::baselines
