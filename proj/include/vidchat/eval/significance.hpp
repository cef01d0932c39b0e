#pragma once

#include <cstdint>
#include <vector>

#include "vidchat/numerics/errors.hpp"
#include "vidchat/numerics/random.hpp"

namespace vidchat::eval {

// Paired bootstrap: resample instances with replacement n times and return
// the fraction of resamples in which system a does not beat system b
// (mean difference <= 0). Small values mean a is significantly better.
inline double bootstrap_significance(const std::vector<double>& a, const std::vector<double>& b,
                                     std::size_t n = 100000, std::uint64_t seed = 0) {
  if (a.size() != b.size()) throw ContractError("bootstrap needs paired records of equal length");
  if (a.empty() || n == 0) throw ContractError("bootstrap needs records and resamples");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  Rng rng = make_rng(seed, "bootstrap");
  std::size_t not_better = 0;
  for (std::size_t s = 0; s < n; ++s) {
    double total = 0.0;
    for (std::size_t k = 0; k < diff.size(); ++k) total += diff[uniform_index(rng, diff.size())];
    not_better += total <= 0.0;
  }
  return static_cast<double>(not_better) / static_cast<double>(n);
}

}  // namespace vidchat::eval
