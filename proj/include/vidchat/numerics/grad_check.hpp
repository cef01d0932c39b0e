#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vidchat/numerics/parameters.hpp"
#include "vidchat/numerics/random.hpp"
#include "vidchat/numerics/tensor.hpp"

namespace vidchat {

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// Max relative error between backward() and central differences for f at x.
// x is copied into a fresh leaf, so the caller's tensor is left untouched.
inline double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                         double eps = 1e-5) {
  Tensor leaf(x.shape(), std::vector<double>(x.data().begin(), x.data().end()), true);
  f(leaf).backward();
  std::vector<double> analytic(leaf.size(), 0.0);
  if (leaf.has_grad()) std::copy(leaf.grad().begin(), leaf.grad().end(), analytic.begin());

  double worst = 0.0;
  auto w = leaf.mutable_data();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + eps;
    const double fp = f(leaf.detach()).item();
    w[i] = orig - eps;
    const double fm = f(leaf.detach()).item();
    w[i] = orig;
    worst = std::max(worst, relative_error(analytic[i], (fp - fm) / (2.0 * eps)));
  }
  return worst;
}

struct ParamCheckOptions {
  double eps = 1e-5;
  // Per parameter, at most this many coordinates are probed (0 = all).
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 0;
};

struct ParamCheckResult {
  double max_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t coords_checked = 0;
};

// Gradient check of a scalar loss over every parameter in a store. `loss`
// must rebuild the graph from the store's current values on each call.
inline ParamCheckResult grad_check_params(const ParameterStore& store,
                                          const std::function<Tensor()>& loss,
                                          ParamCheckOptions opts = {}) {
  store.zero_grad();
  loss().backward();
  ParamCheckResult res;
  Rng rng = make_rng(opts.seed, "grad_check");
  for (const auto& [name, p] : store.all()) {
    std::vector<double> analytic(p.size(), 0.0);
    if (p.has_grad()) std::copy(p.grad().begin(), p.grad().end(), analytic.begin());
    std::vector<std::size_t> coords(p.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (opts.max_coords_per_param && coords.size() > opts.max_coords_per_param) {
      shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.max_coords_per_param);
    }
    auto w = p.mutable_data();
    for (std::size_t i : coords) {
      const double orig = w[i];
      w[i] = orig + opts.eps;
      const double fp = loss().item();
      w[i] = orig - opts.eps;
      const double fm = loss().item();
      w[i] = orig;
      const double err = relative_error(analytic[i], (fp - fm) / (2.0 * opts.eps));
      ++res.coords_checked;
      if (err > res.max_error) {
        res.max_error = err;
        res.worst_param = name;
        res.worst_index = i;
      }
    }
  }
  store.zero_grad();
  return res;
}

}  // namespace vidchat
