#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidchat/models/dataset.hpp"
#include "vidchat/models/registry.hpp"

namespace vidchat::eval {

struct RankedCandidateList {
  std::string instance_id;
  std::uint64_t seed = 0;
  std::vector<double> scores;  // one per candidate, higher is better
  std::size_t positive_index = 0;
};

// 1-based rank of the positive under a stable descending sort: a tie goes
// to the candidate with the smaller index.
inline std::size_t positive_rank(const std::vector<double>& scores, std::size_t positive) {
  if (positive >= scores.size()) throw ContractError("positive index out of range");
  const double s = scores[positive];
  std::size_t rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > s || (scores[j] == s && j < positive)) ++rank;
  }
  return rank;
}

inline int recall_at_k(const RankedCandidateList& list, std::size_t k) {
  return positive_rank(list.scores, list.positive_index) <= k ? 1 : 0;
}

struct InstanceRecord {
  RankedCandidateList list;
  int r1 = 0, r2 = 0, r5 = 0;
};

inline void to_json(nlohmann::json& j, const InstanceRecord& r) {
  j = {{"instance_id", r.list.instance_id}, {"seed", r.list.seed},     {"scores", r.list.scores},
       {"positive_index", r.list.positive_index}, {"r1", r.r1}, {"r2", r.r2}, {"r5", r.r5}};
}

struct RetrievalResult {
  double r1 = 0.0, r2 = 0.0, r5 = 0.0;
  std::vector<InstanceRecord> records;
};

inline InstanceRecord score_list(const models::Scorer& scorer, const models::Dataset& data,
                                 const models::CandidateList& list) {
  std::vector<const std::vector<std::size_t>*> responses;
  for (auto c : list.candidates) responses.push_back(&data[c].response);
  InstanceRecord rec;
  rec.list.instance_id = data[list.instance].id;
  rec.list.seed = list.seed;
  rec.list.positive_index = list.positive_index;
  rec.list.scores = scorer(data[list.instance], responses);
  if (rec.list.scores.size() != list.candidates.size()) throw ContractError("scorer returned the wrong number of scores");
  rec.r1 = recall_at_k(rec.list, 1);
  rec.r2 = recall_at_k(rec.list, 2);
  rec.r5 = recall_at_k(rec.list, 5);
  return rec;
}

inline RetrievalResult summarize(std::vector<InstanceRecord> records) {
  RetrievalResult res;
  for (const auto& r : records) {
    res.r1 += r.r1;
    res.r2 += r.r2;
    res.r5 += r.r5;
  }
  if (!records.empty()) {
    const auto n = static_cast<double>(records.size());
    res.r1 /= n;
    res.r2 /= n;
    res.r5 /= n;
  }
  res.records = std::move(records);
  return res;
}

// One seeded 10-way list per instance (or per instance in `subset`).
inline RetrievalResult evaluate_retrieval(const models::Scorer& scorer, const models::Dataset& data,
                                          std::uint64_t seed, const std::vector<std::size_t>& subset = {}) {
  std::vector<InstanceRecord> records;
  auto run = [&](std::size_t i) { records.push_back(score_list(scorer, data, models::sample_eval_list(data, i, seed))); };
  if (subset.empty()) {
    for (std::size_t i = 0; i < data.size(); ++i) run(i);
  } else {
    for (auto i : subset) run(i);
  }
  return summarize(std::move(records));
}

inline void write_records(std::ostream& os, const RetrievalResult& res) {
  for (const auto& r : res.records) os << nlohmann::json(r).dump() << '\n';
}

// Gives the positive 1 and every other candidate 0.
inline models::Scorer oracle_scorer() {
  return [](const models::Example& ctx, const std::vector<const std::vector<std::size_t>*>& rs) {
    std::vector<double> out;
    for (const auto* r : rs) out.push_back(r == &ctx.response ? 1.0 : 0.0);
    return out;
  };
}

inline models::Scorer constant_scorer(double v = 0.0) {
  return [v](const models::Example&, const std::vector<const std::vector<std::size_t>*>& rs) {
    return std::vector<double>(rs.size(), v);
  };
}

}  // namespace vidchat::eval
