#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vidchat/numerics/tensor.hpp"

namespace vidchat {

namespace detail {

inline void accumulate(Node& parent, std::size_t i, double g) {
  if (parent.requires_grad) parent.grad_buffer()[i] += g;
}

inline bool wants(const Node& parent) { return parent.requires_grad; }

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

inline void require_finite(const Tensor& x, const char* op) {
  for (double v : x.data()) {
    if (std::isnan(v)) throw NumericError(std::string(op) + ": NaN input");
  }
}

template <class Fwd, class Deriv>
Tensor unary(const Tensor& x, Fwd fwd, Deriv deriv) {
  std::vector<double> out(x.size());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(in[i]);
  return Tensor::make_result(x.shape(), std::move(out), {x}, [deriv](Node& self) {
    Node& p = *self.parents[0];
    auto& g = p.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * deriv(p.value[i], self.value[i]);
  });
}

}  // namespace detail

// ---------------------------------------------------------------- products

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  if (a.rank() > 2 || b.rank() > 2) {
    throw DimensionError("matmul: rank > 2 not supported: " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  }
  const std::size_t m = a_vec ? 1 : a.shape()[0];
  const std::size_t k = a_vec ? a.shape()[0] : a.shape()[1];
  const std::size_t kb = b.shape()[0];
  const std::size_t n = b_vec ? 1 : b.shape()[1];
  if (k != kb) {
    throw DimensionError("matmul: inner dimensions differ: " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;
      const double* brow = &B[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  Shape shape;
  if (a_vec && b_vec) shape = {1};
  else if (a_vec) shape = {n};
  else if (b_vec) shape = {m};
  else shape = {m, n};
  return Tensor::make_result(std::move(shape), std::move(out), {a, b}, [m, k, n](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    const auto& G = self.grad;
    if (detail::wants(pa)) {
      auto& ga = pa.grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * pb.value[p * n + j];
          ga[i * k + p] += s;
        }
    }
    if (detail::wants(pb)) {
      auto& gb = pb.grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = pa.value[i * k + p];
          if (av == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av * G[i * n + j];
        }
    }
  });
}

inline Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1) throw DimensionError("dot: expects two vectors");
  return matmul(a, b);
}

inline Tensor transpose(const Tensor& x) {
  if (x.rank() != 2) throw DimensionError("transpose: expects a matrix, got " + shape_str(x.shape()));
  const std::size_t r = x.shape()[0], c = x.shape()[1];
  std::vector<double> out(r * c);
  auto in = x.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
  return Tensor::make_result({c, r}, std::move(out), {x}, [r, c](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[j * r + i];
  });
}

// ---------------------------------------------------------------- pointwise

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    for (auto& p : self.parents) {
      if (!p->requires_grad) continue;
      auto& g = p->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      detail::accumulate(*self.parents[0], i, self.grad[i]);
      detail::accumulate(*self.parents[1], i, -self.grad[i]);
    }
  });
}

// Hadamard product.
inline Tensor mul(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      detail::accumulate(pa, i, self.grad[i] * pb.value[i]);
      detail::accumulate(pb, i, self.grad[i] * pa.value[i]);
    }
  });
}

inline Tensor scale(const Tensor& x, double c) {
  return detail::unary(x, [c](double v) { return c * v; }, [c](double, double) { return c; });
}

inline Tensor add_scalar(const Tensor& x, double c) {
  return detail::unary(x, [c](double v) { return v + c; }, [](double, double) { return 1.0; });
}

inline Tensor neg(const Tensor& x) { return scale(x, -1.0); }

inline Tensor tanh(const Tensor& x) {
  return detail::unary(x, [](double v) { return std::tanh(v); },
                       [](double, double y) { return 1.0 - y * y; });
}

inline double sigmoid_value(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

inline Tensor sigmoid(const Tensor& x) {
  return detail::unary(x, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

inline Tensor exp(const Tensor& x) {
  return detail::unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

inline Tensor log(const Tensor& x) {
  for (double v : x.data()) {
    if (!(v > 0.0)) throw NumericError("log: non-positive input " + std::to_string(v));
  }
  return detail::unary(x, [](double v) { return std::log(v); },
                       [](double v, double) { return 1.0 / v; });
}

inline Tensor relu(const Tensor& x) {
  return detail::unary(x, [](double v) { return v > 0.0 || std::isnan(v) ? v : 0.0; },
                       [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

// max(x, floor) elementwise; gradient is cut where the floor is active. NaN
// passes through.
inline Tensor clamp_min(const Tensor& x, double floor) {
  return detail::unary(x, [floor](double v) { return v > floor || std::isnan(v) ? v : floor; },
                       [floor](double v, double) { return v > floor ? 1.0 : 0.0; });
}

inline double log_sigmoid_value(double v) {
  // log(sigmoid(v)) = -softplus(-v)
  return v >= 0 ? -std::log1p(std::exp(-v)) : v - std::log1p(std::exp(v));
}

inline Tensor log_sigmoid(const Tensor& x) {
  return detail::unary(x, log_sigmoid_value,
                       [](double v, double) { return 1.0 - sigmoid_value(v); });
}

// ---------------------------------------------------------------- broadcasts

// M[i,:] + v for every row i.
inline Tensor add_rows(const Tensor& m, const Tensor& v) {
  if (m.rank() != 2 || v.rank() != 1 || v.size() != m.shape()[1]) {
    throw DimensionError("add_rows: " + shape_str(m.shape()) + " + " + shape_str(v.shape()));
  }
  const std::size_t r = m.shape()[0], c = m.shape()[1];
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = m[i * c + j] + v[j];
  return Tensor::make_result(m.shape(), std::move(out), {m, v}, [r, c](detail::Node& self) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        detail::accumulate(*self.parents[0], i * c + j, self.grad[i * c + j]);
        detail::accumulate(*self.parents[1], j, self.grad[i * c + j]);
      }
  });
}

// M[:,j] + v for every column j.
inline Tensor add_cols(const Tensor& m, const Tensor& v) {
  if (m.rank() != 2 || v.rank() != 1 || v.size() != m.shape()[0]) {
    throw DimensionError("add_cols: " + shape_str(m.shape()) + " + " + shape_str(v.shape()));
  }
  const std::size_t r = m.shape()[0], c = m.shape()[1];
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = m[i * c + j] + v[i];
  return Tensor::make_result(m.shape(), std::move(out), {m, v}, [r, c](detail::Node& self) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        detail::accumulate(*self.parents[0], i * c + j, self.grad[i * c + j]);
        detail::accumulate(*self.parents[1], i, self.grad[i * c + j]);
      }
  });
}

// M[i,:] ⊙ v for every row i.
inline Tensor mul_rows(const Tensor& m, const Tensor& v) {
  if (m.rank() != 2 || v.rank() != 1 || v.size() != m.shape()[1]) {
    throw DimensionError("mul_rows: " + shape_str(m.shape()) + " * " + shape_str(v.shape()));
  }
  const std::size_t r = m.shape()[0], c = m.shape()[1];
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = m[i * c + j] * v[j];
  return Tensor::make_result(m.shape(), std::move(out), {m, v}, [r, c](detail::Node& self) {
    detail::Node& pm = *self.parents[0];
    detail::Node& pv = *self.parents[1];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        detail::accumulate(pm, i * c + j, self.grad[i * c + j] * pv.value[j]);
        detail::accumulate(pv, j, self.grad[i * c + j] * pm.value[i * c + j]);
      }
  });
}

// ---------------------------------------------------------------- reductions

inline Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return Tensor::make_result({1}, {s}, {x}, [](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (auto& gi : g) gi += self.grad[0];
  });
}

inline Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

// Sum of a list of same-shaped tensors.
inline Tensor add_n(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw ContractError("add_n: empty input");
  for (const auto& x : xs) detail::require_same_shape(xs[0], x, "add_n");
  std::vector<double> out(xs[0].size(), 0.0);
  for (const auto& x : xs)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
  return Tensor::make_result(xs[0].shape(), std::move(out), xs, [](detail::Node& self) {
    for (auto& p : self.parents) {
      if (!p->requires_grad) continue;
      auto& g = p->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

// ---------------------------------------------------------------- softmax

namespace detail {

inline void softmax_slice(const double* in, double* out, std::size_t n, std::size_t stride) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, in[i * stride]);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i * stride] = std::exp(in[i * stride] - mx);
    z += out[i * stride];
  }
  for (std::size_t i = 0; i < n; ++i) out[i * stride] /= z;
}

}  // namespace detail

// Vector: axis must be 0. Matrix: axis 1 normalizes each row, axis 0 each column.
inline Tensor softmax(const Tensor& x, int axis = -1) {
  detail::require_finite(x, "softmax");
  if (x.rank() > 2) throw DimensionError("softmax: rank > 2 not supported");
  if (axis < 0) axis = static_cast<int>(x.rank()) - 1;
  const std::size_t r = x.rank() == 2 ? x.shape()[0] : 1;
  const std::size_t c = x.rank() == 2 ? x.shape()[1] : x.shape()[0];
  const bool by_rows = x.rank() == 1 || axis == 1;
  if (x.rank() == 1 && axis != 0) throw DimensionError("softmax: vector axis must be 0");
  std::vector<double> out(x.size());
  auto in = x.data();
  if (by_rows) {
    for (std::size_t i = 0; i < r; ++i) detail::softmax_slice(&in[i * c], &out[i * c], c, 1);
  } else {
    for (std::size_t j = 0; j < c; ++j) detail::softmax_slice(&in[j], &out[j], r, c);
  }
  return Tensor::make_result(x.shape(), std::move(out), {x}, [r, c, by_rows](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    const auto& y = self.value;
    const auto& gy = self.grad;
    const std::size_t slices = by_rows ? r : c;
    const std::size_t len = by_rows ? c : r;
    const std::size_t stride = by_rows ? 1 : c;
    for (std::size_t s = 0; s < slices; ++s) {
      const std::size_t base = by_rows ? s * c : s;
      double d = 0.0;
      for (std::size_t i = 0; i < len; ++i) d += gy[base + i * stride] * y[base + i * stride];
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t k = base + i * stride;
        g[k] += y[k] * (gy[k] - d);
      }
    }
  });
}

// Stable log softmax of a vector, or of every row of a matrix.
inline Tensor log_softmax(const Tensor& x) {
  detail::require_finite(x, "log_softmax");
  if (x.rank() != 1 && x.rank() != 2) throw DimensionError("log_softmax: expects a vector or matrix");
  const std::size_t rows = x.rank() == 1 ? 1 : x.shape()[0];
  const std::size_t n = x.rank() == 1 ? x.size() : x.shape()[1];
  auto X = x.data();
  std::vector<double> out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = &X[r * n];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, in[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(in[i] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t i = 0; i < n; ++i) out[r * n + i] = in[i] - lse;
  }
  return Tensor::make_result(x.shape(), std::move(out), {x}, [rows, n](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      double gs = 0.0;
      for (std::size_t i = 0; i < n; ++i) gs += self.grad[r * n + i];
      for (std::size_t i = 0; i < n; ++i)
        g[r * n + i] += self.grad[r * n + i] - std::exp(self.value[r * n + i]) * gs;
    }
  });
}

// ---------------------------------------------------------------- structure

inline Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_str(x.shape()) + " -> " + shape_str(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::make_result(std::move(shape), std::move(out), {x}, [](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

// Vectors: axis 0 joins end to end. Matrices: axis 0 stacks rows, axis 1 joins columns.
inline Tensor concat(const std::vector<Tensor>& xs, int axis = 0) {
  if (xs.empty()) throw ContractError("concat: empty input");
  const std::size_t rank = xs[0].rank();
  for (const auto& x : xs) {
    if (x.rank() != rank) throw DimensionError("concat: mixed ranks");
  }
  if (rank == 1 || (rank == 2 && axis == 0)) {
    const std::size_t width = rank == 2 ? xs[0].shape()[1] : 0;
    std::vector<double> out;
    std::size_t rows = 0;
    std::vector<std::size_t> sizes;
    for (const auto& x : xs) {
      if (rank == 2 && x.shape()[1] != width) {
        throw DimensionError("concat: column widths differ " + shape_str(xs[0].shape()) + " vs " +
                             shape_str(x.shape()));
      }
      out.insert(out.end(), x.data().begin(), x.data().end());
      sizes.push_back(x.size());
      rows += rank == 2 ? x.shape()[0] : x.size();
    }
    Shape shape = rank == 2 ? Shape{rows, width} : Shape{rows};
    return Tensor::make_result(std::move(shape), std::move(out), xs, [sizes](detail::Node& self) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        detail::Node& p = *self.parents[k];
        if (p.requires_grad) {
          auto& g = p.grad_buffer();
          for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[off + i];
        }
        off += sizes[k];
      }
    });
  }
  if (rank == 2 && axis == 1) {
    const std::size_t r = xs[0].shape()[0];
    std::vector<std::size_t> widths;
    std::size_t total = 0;
    for (const auto& x : xs) {
      if (x.shape()[0] != r) throw DimensionError("concat: row counts differ");
      widths.push_back(x.shape()[1]);
      total += x.shape()[1];
    }
    std::vector<double> out(r * total);
    std::size_t off = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < widths[k]; ++j) out[i * total + off + j] = xs[k][i * widths[k] + j];
      off += widths[k];
    }
    return Tensor::make_result({r, total}, std::move(out), xs, [widths, r, total](detail::Node& self) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < widths.size(); ++k) {
        detail::Node& p = *self.parents[k];
        if (p.requires_grad) {
          auto& g = p.grad_buffer();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < widths[k]; ++j) g[i * widths[k] + j] += self.grad[i * total + off + j];
        }
        off += widths[k];
      }
    });
  }
  throw DimensionError("concat: unsupported axis " + std::to_string(axis));
}

// Stack equal-length vectors as the rows of a matrix.
inline Tensor stack(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw ContractError("stack: empty input");
  const std::size_t c = rows[0].size();
  std::vector<Tensor> as_rows;
  as_rows.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.rank() != 1 || r.size() != c) throw DimensionError("stack: expects equal-length vectors");
    as_rows.push_back(reshape(r, {1, c}));
  }
  return concat(as_rows, 0);
}

// Row i of a matrix as a vector.
inline Tensor row(const Tensor& m, std::size_t i) {
  if (m.rank() != 2 || i >= m.shape()[0]) {
    throw DimensionError("row: index " + std::to_string(i) + " out of " + shape_str(m.shape()));
  }
  const std::size_t c = m.shape()[1];
  std::vector<double> out(m.data().begin() + i * c, m.data().begin() + (i + 1) * c);
  return Tensor::make_result({c}, std::move(out), {m}, [i, c](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[j];
  });
}

// Rows [begin, end) of a matrix.
inline Tensor slice_rows(const Tensor& m, std::size_t begin, std::size_t end) {
  if (m.rank() != 2 || begin >= end || end > m.shape()[0]) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of " + shape_str(m.shape()));
  }
  const std::size_t c = m.shape()[1];
  std::vector<double> out(m.data().begin() + begin * c, m.data().begin() + end * c);
  return Tensor::make_result({end - begin, c}, std::move(out), {m}, [begin, c](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t k = 0; k < self.grad.size(); ++k) g[begin * c + k] += self.grad[k];
  });
}

// Elements [begin, end) of a vector.
inline Tensor slice(const Tensor& v, std::size_t begin, std::size_t end) {
  if (v.rank() != 1 || begin >= end || end > v.size()) {
    throw DimensionError("slice: [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of " + shape_str(v.shape()));
  }
  std::vector<double> out(v.data().begin() + begin, v.data().begin() + end);
  return Tensor::make_result({end - begin}, std::move(out), {v}, [begin](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t k = 0; k < self.grad.size(); ++k) g[begin + k] += self.grad[k];
  });
}

// Embedding lookup: rows of m selected by index, as a matrix.
inline Tensor gather_rows(const Tensor& m, const std::vector<std::size_t>& idx) {
  if (m.rank() != 2) throw DimensionError("gather_rows: expects a matrix");
  if (idx.empty()) throw ContractError("gather_rows: empty index list");
  const std::size_t c = m.shape()[1];
  std::vector<double> out(idx.size() * c);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= m.shape()[0]) throw DimensionError("gather_rows: index out of range");
    std::copy_n(m.data().begin() + idx[k] * c, c, out.begin() + k * c);
  }
  return Tensor::make_result({idx.size(), c}, std::move(out), {m}, [idx, c](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (std::size_t j = 0; j < c; ++j) g[idx[k] * c + j] += self.grad[k * c + j];
  });
}

// Element i as a scalar.
inline Tensor pick(const Tensor& x, std::size_t i) {
  if (i >= x.size()) throw DimensionError("pick: index out of range");
  return Tensor::make_result({1}, {x[i]}, {x}, [i](detail::Node& self) {
    self.parents[0]->grad_buffer()[i] += self.grad[0];
  });
}

// out[r] = m[r, idx[r]].
inline Tensor pick_rows(const Tensor& m, const std::vector<std::size_t>& idx) {
  if (m.rank() != 2 || idx.size() != m.shape()[0]) throw DimensionError("pick_rows: one index per row required");
  const std::size_t c = m.shape()[1];
  std::vector<double> out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= c) throw DimensionError("pick_rows: index out of range");
    out[r] = m.data()[r * c + idx[r]];
  }
  return Tensor::make_result({idx.size()}, std::move(out), {m}, [idx, c](detail::Node& self) {
    auto& g = self.parents[0]->grad_buffer();
    for (std::size_t r = 0; r < idx.size(); ++r) g[r * c + idx[r]] += self.grad[r];
  });
}

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }

}  // namespace vidchat
