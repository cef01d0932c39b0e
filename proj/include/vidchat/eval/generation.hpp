#pragma once

#include <string>
#include <vector>

#include "vidchat/eval/phrase_metrics.hpp"
#include "vidchat/models/generative.hpp"

namespace vidchat::eval {

struct GenerationRecord {
  std::string instance_id;
  Tokens hypothesis;
  double rouge_l = 0.0;
  double meteor_lite = 0.0;
};

struct GenerationResult {
  double rouge_l = 0.0;
  double meteor_lite = 0.0;
  std::vector<GenerationRecord> records;
};

// Greedy responses scored against every utterance of the instance's
// response window.
inline GenerationResult evaluate_generation(const models::GenerativeModel& model, const models::Dataset& data,
                                            const std::vector<std::size_t>& subset = {}) {
  GenerationResult res;
  auto run = [&](std::size_t i) {
    const auto& e = data[i];
    GenerationRecord r;
    r.instance_id = e.id;
    r.hypothesis = model.generate(e).tokens;
    r.rouge_l = rouge_l(r.hypothesis, e.references);
    r.meteor_lite = meteor_lite(r.hypothesis, e.references);
    res.rouge_l += r.rouge_l;
    res.meteor_lite += r.meteor_lite;
    res.records.push_back(std::move(r));
  };
  if (subset.empty()) {
    for (std::size_t i = 0; i < data.size(); ++i) run(i);
  } else {
    for (auto i : subset) run(i);
  }
  if (!res.records.empty()) {
    res.rouge_l /= static_cast<double>(res.records.size());
    res.meteor_lite /= static_cast<double>(res.records.size());
  }
  return res;
}

}  // namespace vidchat::eval
