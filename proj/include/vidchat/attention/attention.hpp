#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "vidchat/numerics/ops.hpp"
#include "vidchat/numerics/parameters.hpp"

namespace vidchat::attention {

// A normalized attention distribution. For a rows x cols map with axis 1
// every row sums to one; with axis 0 every column does.
struct AttentionMap {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  int axis = 1;
  std::vector<double> weights;

  double at(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }

  // Largest |sum - 1| over the normalized slices.
  double max_normalization_error() const {
    double worst = 0.0;
    const std::size_t slices = axis == 1 ? rows : cols;
    const std::size_t len = axis == 1 ? cols : rows;
    for (std::size_t s = 0; s < slices; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < len; ++i) sum += axis == 1 ? at(s, i) : at(i, s);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
  }
};

// Collects every distribution computed during a forward pass.
struct Recorder {
  std::vector<AttentionMap> maps;

  void record(const std::string& name, const Tensor& weights, int axis) {
    AttentionMap m;
    m.name = name;
    m.rows = weights.rows();
    m.cols = weights.cols();
    m.axis = weights.rank() == 1 ? 1 : axis;
    m.weights.assign(weights.data().begin(), weights.data().end());
    maps.push_back(std::move(m));
  }
};

inline void maybe_record(Recorder* rec, const std::string& name, const Tensor& weights, int axis) {
  if (rec) rec->record(name, weights, axis);
}

// S[i,j] = w · [a_i; b_j; a_i ⊙ b_j] = Σ_k w3_k (a_ik b_jk) + (a_i·w1 + b_j·w2).
// Fused so that swapping the operands (and the w1/w2 blocks) yields exactly
// the transpose: every product and sum is formed in an operand-symmetric order.
inline Tensor trilinear_similarity(const Tensor& a, const Tensor& b, const Tensor& w) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[1]) {
    throw DimensionError("trilinear_similarity: state dims differ " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
  const std::size_t m = a.shape()[0], n = b.shape()[0], d = a.shape()[1];
  if (w.rank() != 1 || w.size() != 3 * d) {
    throw DimensionError("trilinear_similarity: weight " + shape_str(w.shape()) + " for state dim " +
                         std::to_string(d));
  }
  auto A = a.data();
  auto B = b.data();
  auto W = w.data();
  std::vector<double> la(m, 0.0), lb(n, 0.0), out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < d; ++k) la[i] += W[k] * A[i * d + k];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < d; ++k) lb[j] += W[d + k] * B[j * d + k];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double cross = 0.0;
      for (std::size_t k = 0; k < d; ++k) cross += W[2 * d + k] * (A[i * d + k] * B[j * d + k]);
      out[i * n + j] = cross + (la[i] + lb[j]);
    }
  return Tensor::make_result({m, n}, std::move(out), {a, b, w}, [m, n, d](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    detail::Node& pw = *self.parents[2];
    const auto& G = self.grad;
    const auto& A = pa.value;
    const auto& B = pb.value;
    const auto& W = pw.value;
    std::vector<double> row_g(m, 0.0), col_g(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        row_g[i] += G[i * n + j];
        col_g[j] += G[i * n + j];
      }
    if (detail::wants(pa)) {
      auto& ga = pa.grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < d; ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * B[j * d + k];
          ga[i * d + k] += W[k] * row_g[i] + W[2 * d + k] * s;
        }
    }
    if (detail::wants(pb)) {
      auto& gb = pb.grad_buffer();
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < d; ++k) {
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += G[i * n + j] * A[i * d + k];
          gb[j * d + k] += W[d + k] * col_g[j] + W[2 * d + k] * s;
        }
    }
    if (detail::wants(pw)) {
      auto& gw = pw.grad_buffer();
      for (std::size_t k = 0; k < d; ++k) {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t i = 0; i < m; ++i) s1 += row_g[i] * A[i * d + k];
        for (std::size_t j = 0; j < n; ++j) s2 += col_g[j] * B[j * d + k];
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) s3 += G[i * n + j] * A[i * d + k] * B[j * d + k];
        gw[k] += s1;
        gw[d + k] += s2;
        gw[2 * d + k] += s3;
      }
    }
  });
}

struct Flow {
  Tensor a_from_b;  // m x d: row i = Σ_j α[i,j] b_j
  Tensor b_from_a;  // n x d: row j = Σ_i β[j,i] a_i
  Tensor alpha;     // m x n, rows sum to 1
  Tensor beta;      // m x n, columns sum to 1
};

// Bidirectional attention flow between two state sequences.
inline Flow bidaf_flow(const Tensor& a, const Tensor& b, const Tensor& w, Recorder* rec = nullptr,
                       const std::string& name = "flow") {
  Tensor s = trilinear_similarity(a, b, w);
  Flow f;
  f.alpha = softmax(s, 1);
  f.beta = softmax(s, 0);
  maybe_record(rec, name + ".alpha", f.alpha, 1);
  maybe_record(rec, name + ".beta", f.beta, 0);
  f.a_from_b = matmul(f.alpha, b);
  f.b_from_a = matmul(transpose(f.beta), a);
  return f;
}

struct SelfAttentionParams {
  Tensor w;  // d' x d'
  Tensor b;  // d'
  Tensor v;  // d'

  static SelfAttentionParams create(ParameterStore& store, const std::string& name, std::size_t dim) {
    return {store.create(name + ".W", {dim, dim}), store.create(name + ".b", {dim}),
            store.create(name + ".V", {dim})};
  }
};

struct FlowParams {
  // Similarity weights for the (v,u), (v,r), (u,r) pairs; all three alias
  // one tensor when shared.
  Tensor w_vu, w_vr, w_ur;
  SelfAttentionParams self_v, self_u, self_r;

  static FlowParams create(ParameterStore& store, const std::string& name, std::size_t state_dim,
                           bool shared_similarity = false) {
    FlowParams p;
    if (shared_similarity) {
      p.w_vu = p.w_vr = p.w_ur = store.create(name + ".wS", {3 * state_dim});
    } else {
      p.w_vu = store.create(name + ".wS_vu", {3 * state_dim});
      p.w_vr = store.create(name + ".wS_vr", {3 * state_dim});
      p.w_ur = store.create(name + ".wS_ur", {3 * state_dim});
    }
    p.self_v = SelfAttentionParams::create(store, name + ".self_v", 3 * state_dim);
    p.self_u = SelfAttentionParams::create(store, name + ".self_u", 3 * state_dim);
    p.self_r = SelfAttentionParams::create(store, name + ".self_r", 3 * state_dim);
    return p;
  }
};

struct Augmented {
  Tensor video;     // m x 3d: [h_v; c^{v<-u}; c^{v<-r}]
  Tensor chat;      // n x 3d: [h_u; c^{u<-v}; c^{u<-r}]
  Tensor response;  // k x 3d: [h_r; c^{r<-v}; c^{r<-u}]
};

// Pairwise flows among the three modalities; each state is concatenated
// with the context vectors it receives from the other two.
inline Augmented augment_states_tridaf(const Tensor& hv, const Tensor& hu, const Tensor& hr, const FlowParams& p,
                                       Recorder* rec = nullptr) {
  Flow vu = bidaf_flow(hv, hu, p.w_vu, rec, "tridaf.vu");
  Flow vr = bidaf_flow(hv, hr, p.w_vr, rec, "tridaf.vr");
  Flow ur = bidaf_flow(hu, hr, p.w_ur, rec, "tridaf.ur");
  return {concat({hv, vu.a_from_b, vr.a_from_b}, 1), concat({hu, vu.b_from_a, ur.a_from_b}, 1),
          concat({hr, vr.b_from_a, ur.b_from_a}, 1)};
}

struct Pooled {
  Tensor vector;   // d'
  Tensor weights;  // T
};

// e_i = V · tanh(W ĥ_i + b); weights = softmax(e); result = Σ weights_i ĥ_i.
inline Pooled self_attend(const Tensor& states, const SelfAttentionParams& p, Recorder* rec = nullptr,
                          const std::string& name = "self") {
  if (states.rank() != 2) throw DimensionError("self_attend: expects T x d states");
  Tensor hidden = tanh(add_rows(matmul(states, p.w), p.b));
  Tensor weights = softmax(matmul(hidden, p.v));
  maybe_record(rec, name, weights, 1);
  return {matmul(weights, states), weights};
}

struct Attended {
  Tensor context;  // d_k
  Tensor weights;  // T
};

// e_i = qᵀ W k_i over the keys; context = Σ softmax(e)_i k_i.
inline Attended bilinear_attention(const Tensor& query, const Tensor& keys, const Tensor& w, Recorder* rec = nullptr,
                                   const std::string& name = "bilinear") {
  if (query.rank() != 1 || keys.rank() != 2 || w.rank() != 2 || w.shape()[0] != query.size() ||
      w.shape()[1] != keys.shape()[1]) {
    throw DimensionError("bilinear_attention: query " + shape_str(query.shape()) + ", keys " +
                         shape_str(keys.shape()) + ", W " + shape_str(w.shape()));
  }
  Tensor weights = softmax(matmul(keys, matmul(query, w)));
  maybe_record(rec, name, weights, 1);
  return {matmul(weights, keys), weights};
}

// bilinear_attention for every row of a T x d_q query matrix at once.
// contexts: T x d_k; weights: T x n, each row a distribution over the keys.
inline Attended bilinear_attention_rows(const Tensor& queries, const Tensor& keys, const Tensor& w,
                                        Recorder* rec = nullptr, const std::string& name = "bilinear") {
  if (queries.rank() != 2 || keys.rank() != 2 || w.rank() != 2 || w.shape()[0] != queries.shape()[1] ||
      w.shape()[1] != keys.shape()[1]) {
    throw DimensionError("bilinear_attention_rows: queries " + shape_str(queries.shape()) + ", keys " +
                         shape_str(keys.shape()) + ", W " + shape_str(w.shape()));
  }
  Tensor weights = softmax(matmul(matmul(queries, w), transpose(keys)), 1);
  maybe_record(rec, name, weights, 1);
  return {matmul(weights, keys), weights};
}

// One "row<TAB>col<TAB>weight" line per cell.
inline void write_attention_tsv(std::ostream& os, const std::vector<std::string>& row_labels,
                                const std::vector<std::string>& col_labels, const std::vector<double>& weights) {
  const auto old = os.precision(17);
  os << "row\tcol\tweight\n";
  for (std::size_t r = 0; r < row_labels.size(); ++r)
    for (std::size_t c = 0; c < col_labels.size(); ++c)
      os << row_labels[r] << '\t' << col_labels[c] << '\t' << weights[r * col_labels.size() + c] << '\n';
  os.precision(old);
}

}  // namespace vidchat::attention
