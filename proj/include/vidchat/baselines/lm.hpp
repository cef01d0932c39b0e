#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "vidchat/encoders/lstm.hpp"
#include "vidchat/models/checkpoint.hpp"
#include "vidchat/models/dataset.hpp"
#include "vidchat/numerics/optim.hpp"

namespace vidchat::baselines {

struct LmConfig {
  std::size_t emb_dim = 100;
  std::size_t hidden = 256;
  double init_scale = 0.08;
  double lr = 1e-3;
  std::size_t batch = 32;
  double clip_norm = 2.0;
  std::size_t epochs = 1;
  std::size_t max_len = 70;  // longer texts keep their last max_len ids
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LmConfig, emb_dim, hidden, init_scale, lr, batch, clip_norm, epochs,
                                                max_len)

// Single-layer LSTM language model over chat text. Its final hidden state
// is the text representation shared by the simple baselines.
class LanguageModel {
 public:
  LanguageModel(LmConfig cfg, encoders::Vocab vocab, std::uint64_t seed)
      : cfg_(cfg), seed_(seed), store_(seed, cfg.init_scale) {
    emb_ = encoders::EmbeddingTable::create(store_, "lm.emb", std::move(vocab), cfg_.emb_dim);
    cell_ = encoders::LstmCell::create(store_, "lm.lstm", cfg_.emb_dim, cfg_.hidden);
    out_ = encoders::Linear::create(store_, "lm.out", cfg_.hidden, emb_.vocab.size());
  }

  const LmConfig& config() const { return cfg_; }
  const encoders::Vocab& vocab() const { return emb_.vocab; }
  std::uint64_t seed() const { return seed_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }
  std::size_t dim() const { return cfg_.hidden; }

  // Mean per-token negative log-likelihood of ids followed by <EOS>.
  Tensor sequence_loss(const std::vector<std::size_t>& text) const {
    const auto ids = encoders::keep_last(text, cfg_.max_len);
    std::vector<std::size_t> inputs{encoders::kBos};
    inputs.insert(inputs.end(), ids.begin(), ids.end());
    std::vector<std::size_t> targets = ids;
    targets.push_back(encoders::kEos);
    Tensor x = emb_.lookup(inputs);
    encoders::LstmState s = cell_.zero_state();
    std::vector<Tensor> hs;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      s = cell_.step(row(x, t), s);
      hs.push_back(s.h);
    }
    Tensor logp = log_softmax(out_(stack(hs)));
    return scale(neg(sum(pick_rows(logp, targets))), 1.0 / static_cast<double>(targets.size()));
  }

  // Final hidden state after reading <BOS> and the text.
  std::vector<double> represent(const std::vector<std::size_t>& text) const {
    auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
    const auto ids = encoders::keep_last(text, cfg_.max_len);
    std::vector<std::size_t> inputs{encoders::kBos};
    inputs.insert(inputs.end(), ids.begin(), ids.end());
    Tensor x = emb_.lookup(inputs);
    encoders::LstmState s = cell_.zero_state();
    for (std::size_t t = 0; t < inputs.size(); ++t) s = cell_.step(row(x, t), s);
    std::vector<double> h(s.h.data().begin(), s.h.data().end());
    cache_.emplace(text, h);
    return h;
  }

  void clear_cache() const { cache_.clear(); }

  nlohmann::json header() const {
    return {{"kind", "lm"}, {"config", cfg_}, {"vocab", emb_.vocab.tokens()}, {"seed", seed_}};
  }

 private:
  LmConfig cfg_;
  std::uint64_t seed_;
  ParameterStore store_;
  encoders::EmbeddingTable emb_;
  encoders::LstmCell cell_;
  encoders::Linear out_;
  mutable std::map<std::vector<std::size_t>, std::vector<double>> cache_;
};

// Chat contexts and responses of the training split, as LM training texts.
inline std::vector<std::vector<std::size_t>> lm_texts(const models::Dataset& data) {
  std::vector<std::vector<std::size_t>> texts;
  for (const auto& e : data) {
    if (!e.chat.empty()) texts.push_back(e.chat);
    if (!e.response.empty()) texts.push_back(e.response);
  }
  return texts;
}

// Mini-batch Adam on the mean per-text loss; returns the mean loss per epoch.
inline std::vector<double> train_lm(LanguageModel& lm, const std::vector<std::vector<std::size_t>>& texts) {
  if (texts.empty()) throw DataError("language model: no training text");
  const auto& cfg = lm.config();
  Adam adam(AdamOptions{cfg.lr});
  std::vector<double> trace;
  std::vector<std::size_t> order(texts.size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(lm.seed(), "lm/order/" + std::to_string(epoch));
    shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<Tensor> losses;
      for (std::size_t k = start; k < end; ++k) losses.push_back(lm.sequence_loss(texts[order[k]]));
      Tensor loss = scale(add_n(losses), 1.0 / static_cast<double>(losses.size()));
      if (!std::isfinite(loss.item())) throw NumericError("language model: non-finite loss");
      total += loss.item() * static_cast<double>(losses.size());
      lm.params().zero_grad();
      loss.backward();
      clip_grad_norm(lm.params(), cfg.clip_norm);
      adam.step(lm.params());
    }
    trace.push_back(total / static_cast<double>(texts.size()));
  }
  lm.clear_cache();
  return trace;
}

inline void save_lm(const std::filesystem::path& path, const LanguageModel& lm) {
  models::save_checkpoint(path, lm.header(), lm.params());
}

inline LanguageModel lm_from_checkpoint(const models::Checkpoint& ck) {
  try {
    if (ck.header.at("kind") != "lm") throw ConfigError("checkpoint is not a language model");
    LanguageModel lm(ck.header.at("config").get<LmConfig>(),
                     encoders::Vocab(ck.header.at("vocab").get<std::vector<std::string>>()),
                     ck.header.at("seed").get<std::uint64_t>());
    models::apply_checkpoint(ck, lm.params());
    return lm;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad language model header: ") + e.what());
  }
}

}  // namespace vidchat::baselines
