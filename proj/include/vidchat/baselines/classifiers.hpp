#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "vidchat/baselines/lm.hpp"
#include "vidchat/models/registry.hpp"
#include "vidchat/numerics/ops.hpp"

namespace vidchat::baselines {

struct LabeledSet {
  std::vector<std::vector<double>> x;
  std::vector<int> y;  // 1 positive, 0 negative
};

inline std::vector<double> pair_features(const std::vector<double>& context, const std::vector<double>& response) {
  std::vector<double> f = context;
  f.insert(f.end(), response.begin(), response.end());
  return f;
}

// Positives and sampled negatives as (context, response) features. The
// representations ignore video, so only wrong-chat and wrong-response
// negatives are kept: a wrong-video negative would duplicate the positive.
inline LabeledSet make_pair_set(const LanguageModel& lm, const models::Dataset& data, std::size_t negatives,
                                std::uint64_t seed) {
  LabeledSet set;
  Rng rng = make_rng(seed, "baselines/negatives");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = data[i];
    const auto ctx = lm.represent(e.chat);
    set.x.push_back(pair_features(ctx, lm.represent(e.response)));
    set.y.push_back(1);
    const auto n = models::sample_negatives(data, i, negatives, rng);
    if (n.chat) {
      set.x.push_back(pair_features(lm.represent(data[*n.chat].chat), lm.represent(e.response)));
      set.y.push_back(0);
    }
    if (n.response) {
      set.x.push_back(pair_features(ctx, lm.represent(data[*n.response].response)));
      set.y.push_back(0);
    }
  }
  return set;
}

struct LogisticRegression {
  std::vector<double> w;
  double b = 0.0;

  double probability(const std::vector<double>& x) const {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
    return sigmoid_value(z);
  }
};

// Full-batch gradient descent on the mean log loss.
inline LogisticRegression train_logistic(const LabeledSet& set, double lr = 0.5, std::size_t iterations = 500,
                                         double l2 = 0.0) {
  if (set.x.empty()) throw DataError("logistic regression: empty training set");
  const std::size_t d = set.x.front().size();
  LogisticRegression m;
  m.w.assign(d, 0.0);
  const double n = static_cast<double>(set.x.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> gw(d, 0.0);
    double gb = 0.0;
    for (std::size_t k = 0; k < set.x.size(); ++k) {
      const double err = m.probability(set.x[k]) - set.y[k];
      for (std::size_t i = 0; i < d; ++i) gw[i] += err * set.x[k][i];
      gb += err;
    }
    for (std::size_t i = 0; i < d; ++i) m.w[i] -= lr * (gw[i] / n + l2 * m.w[i]);
    m.b -= lr * gb / n;
  }
  return m;
}

inline constexpr double kVarianceFloor = 1e-6;

// Per-class, per-feature Gaussians with class priors.
struct GaussianNaiveBayes {
  std::vector<double> mean[2], var[2];
  double log_prior[2] = {0.0, 0.0};

  double probability(const std::vector<double>& x) const {
    double ll[2];
    for (int c = 0; c < 2; ++c) {
      ll[c] = log_prior[c];
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean[c][i];
        ll[c] -= 0.5 * (std::log(2.0 * std::numbers::pi * var[c][i]) + d * d / var[c][i]);
      }
    }
    return sigmoid_value(ll[1] - ll[0]);
  }
};

inline GaussianNaiveBayes train_naive_bayes(const LabeledSet& set) {
  if (set.x.empty()) throw DataError("naive Bayes: empty training set");
  const std::size_t d = set.x.front().size();
  GaussianNaiveBayes m;
  double count[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(d, 0.0);
    m.var[c].assign(d, 0.0);
  }
  for (std::size_t k = 0; k < set.x.size(); ++k) {
    const int c = set.y[k];
    count[c] += 1.0;
    for (std::size_t i = 0; i < d; ++i) m.mean[c][i] += set.x[k][i];
  }
  if (count[0] == 0.0 || count[1] == 0.0) throw DataError("naive Bayes: both classes are needed");
  for (int c = 0; c < 2; ++c)
    for (auto& v : m.mean[c]) v /= count[c];
  for (std::size_t k = 0; k < set.x.size(); ++k) {
    const int c = set.y[k];
    for (std::size_t i = 0; i < d; ++i) {
      const double dv = set.x[k][i] - m.mean[c][i];
      m.var[c][i] += dv * dv;
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (auto& v : m.var[c]) v = std::max(v / count[c], kVarianceFloor);
    m.log_prior[c] = std::log(count[c] / (count[0] + count[1]));
  }
  return m;
}

template <class Classifier>
models::Scorer classifier_scorer(const LanguageModel& lm, Classifier clf) {
  return [&lm, clf = std::move(clf)](const models::Example& ctx,
                                     const std::vector<const std::vector<std::size_t>*>& rs) {
    const auto c = lm.represent(ctx.chat);
    std::vector<double> s;
    for (const auto* r : rs) s.push_back(clf.probability(pair_features(c, lm.represent(*r))));
    return s;
  };
}

inline double accuracy(const LabeledSet& set, const auto& clf) {
  std::size_t ok = 0;
  for (std::size_t k = 0; k < set.x.size(); ++k) ok += (clf.probability(set.x[k]) >= 0.5) == (set.y[k] == 1);
  return static_cast<double>(ok) / static_cast<double>(set.x.size());
}

}  // namespace vidchat::baselines
