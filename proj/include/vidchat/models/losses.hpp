#pragma once

#include <cmath>
#include <vector>

#include "vidchat/numerics/ops.hpp"

namespace vidchat::models {

// log p is floored here so saturated sigmoids keep the hinges finite.
inline const double kLogProbFloor = std::log(1e-12);

// log σ(z), floored.
inline Tensor log_prob_from_logit(const Tensor& logit) { return clamp_min(log_sigmoid(logit), kLogProbFloor); }

// Σ_k max(0, M + log p_neg_k − log p_pos). Used for both the
// discriminative triple probabilities and the decoder's response
// log-likelihoods.
inline Tensor max_margin_loss(const Tensor& logp_pos, const std::vector<Tensor>& logp_negs, double margin) {
  if (logp_negs.empty()) return Tensor::scalar(0.0);
  std::vector<Tensor> hinges;
  hinges.reserve(logp_negs.size());
  for (const auto& n : logp_negs) hinges.push_back(relu(add_scalar(sub(n, logp_pos), margin)));
  return add_n(hinges);
}

inline Tensor generative_max_margin(const Tensor& logp_pos, const std::vector<Tensor>& logp_negs, double margin) {
  return max_margin_loss(logp_pos, logp_negs, margin);
}

// −log σ(z_pos) − Σ log(1 − σ(z_neg)), both terms floored.
inline Tensor classification_loss(const Tensor& logit_pos, const std::vector<Tensor>& logit_negs) {
  std::vector<Tensor> terms{neg(log_prob_from_logit(logit_pos))};
  for (const auto& z : logit_negs) terms.push_back(neg(log_prob_from_logit(neg(z))));
  return add_n(terms);
}

inline Tensor joint_loss(const Tensor& xe, const Tensor& mm, double lambda) { return add(xe, scale(mm, lambda)); }

}  // namespace vidchat::models
