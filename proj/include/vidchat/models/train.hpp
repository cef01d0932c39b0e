#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "vidchat/models/config.hpp"
#include "vidchat/models/dataset.hpp"
#include "vidchat/numerics/optim.hpp"

namespace vidchat::models {

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-instance loss of each epoch
  std::size_t steps = 0;
  std::optional<std::size_t> best_epoch;
  double best_metric = 0.0;
};

struct TrainHooks {
  // Called after every epoch (1-based) with its mean loss, e.g. to checkpoint.
  std::function<void(std::size_t epoch, double loss)> on_epoch;
  // Validation metric (higher is better). When set, the parameters of the
  // best epoch are restored at the end.
  std::function<double(std::size_t epoch)> select;
};

// Mini-batch training: per batch the mean instance loss is backpropagated,
// gradients are clipped to clip_norm and Adam takes one step. Negatives are
// redrawn every epoch. A non-finite loss aborts with NumericError.
template <class Model>
TrainResult train(Model& model, const Dataset& data, const TrainConfig& cfg, const TrainHooks& hooks = {}) {
  cfg.validate();
  if (data.empty()) throw DataError("train: empty dataset");
  auto& store = model.params();
  Adam adam(AdamOptions{cfg.lr});
  TrainResult res;
  std::optional<std::map<std::string, std::vector<double>>> best;
  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = make_rng(cfg.seed, "train/order/" + std::to_string(epoch));
    shuffle(order.begin(), order.end(), shuffle_rng);
    Rng neg_rng = make_rng(cfg.seed, "train/negatives/" + std::to_string(epoch));
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<Tensor> losses;
      for (std::size_t k = start; k < end; ++k) {
        NegativeSet negs = sample_negatives(data, order[k], cfg.negatives, neg_rng);
        losses.push_back(model.example_loss(data, order[k], negs));
      }
      Tensor batch_loss = scale(add_n(losses), 1.0 / static_cast<double>(losses.size()));
      const double value = batch_loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at instance " +
                           data[order[start]].id);
      }
      total += value * static_cast<double>(losses.size());
      store.zero_grad();
      batch_loss.backward();
      clip_grad_norm(store, cfg.clip_norm);
      adam.step(store);
      ++res.steps;
    }
    const double mean_loss = total / static_cast<double>(data.size());
    res.epoch_loss.push_back(mean_loss);
    if (hooks.on_epoch) hooks.on_epoch(epoch, mean_loss);
    if (hooks.select) {
      const double metric = hooks.select(epoch);
      if (!res.best_epoch || metric > res.best_metric) {
        res.best_epoch = epoch;
        res.best_metric = metric;
        best = store.snapshot();
      }
    }
  }
  if (best) store.restore(*best);
  return res;
}

}  // namespace vidchat::models
