#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vidchat/numerics/random.hpp"
#include "vidchat/numerics/tensor.hpp"

namespace vidchat {

// Named trainable tensors. Iteration is sorted by name so optimizers,
// checkpoints and gradient checks visit parameters in a fixed order.
class ParameterStore {
 public:
  explicit ParameterStore(std::uint64_t seed = 0, double init_scale = 0.08)
      : seed_(seed), init_scale_(init_scale) {}

  std::uint64_t seed() const { return seed_; }
  double init_scale() const { return init_scale_; }

  // Uniform(-init_scale, init_scale) from a substream keyed by the name, so
  // a parameter's initial value does not depend on creation order.
  Tensor& create(const std::string& name, Shape shape) {
    if (params_.count(name)) throw ConfigError("duplicate parameter name: " + name);
    Rng rng = make_rng(seed_, "init/" + name);
    std::vector<double> v(shape_size(shape));
    for (auto& x : v) x = uniform_real(rng, -init_scale_, init_scale_);
    return params_.emplace(name, Tensor(std::move(shape), std::move(v), true)).first->second;
  }

  Tensor& create_zero(const std::string& name, Shape shape) {
    if (params_.count(name)) throw ConfigError("duplicate parameter name: " + name);
    return params_.emplace(name, Tensor::zeros(std::move(shape), true)).first->second;
  }

  bool contains(const std::string& name) const { return params_.count(name) > 0; }

  const Tensor& get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
  }

  const std::map<std::string, Tensor>& all() const { return params_; }
  std::size_t size() const { return params_.size(); }

  std::size_t num_scalars() const {
    std::size_t n = 0;
    for (const auto& [_, p] : params_) n += p.size();
    return n;
  }

  void zero_grad() const {
    for (const auto& [_, p] : params_) p.zero_grad();
  }

  void fill(double v) const {
    for (const auto& [_, p] : params_)
      for (auto& x : p.mutable_data()) x = v;
  }

  // Deep copy of current values (grads dropped).
  std::map<std::string, std::vector<double>> snapshot() const {
    std::map<std::string, std::vector<double>> out;
    for (const auto& [name, p] : params_) out[name].assign(p.data().begin(), p.data().end());
    return out;
  }

  void restore(const std::map<std::string, std::vector<double>>& snap) const {
    for (const auto& [name, values] : snap) {
      const Tensor& p = get(name);
      if (values.size() != p.size()) throw DimensionError("restore: size mismatch for " + name);
      std::copy(values.begin(), values.end(), p.mutable_data().begin());
    }
  }

  double grad_norm() const {
    double s = 0.0;
    for (const auto& [_, p] : params_)
      for (double g : p.grad()) s += g * g;
    return std::sqrt(s);
  }

 private:
  std::uint64_t seed_;
  double init_scale_;
  std::map<std::string, Tensor> params_;
};

}  // namespace vidchat
