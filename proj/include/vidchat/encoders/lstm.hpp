#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/encoders/vocab.hpp"
#include "vidchat/numerics/ops.hpp"
#include "vidchat/numerics/parameters.hpp"

namespace vidchat::encoders {

// y = x W + b, applied to a vector or to every row of a matrix. W is in x out.
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out,
                       bool with_bias = true) {
    Linear l;
    l.weight = store.create(name + ".W", {in, out});
    if (with_bias) l.bias = store.create(name + ".b", {out});
    return l;
  }

  std::size_t in_dim() const { return weight.shape()[0]; }
  std::size_t out_dim() const { return weight.shape()[1]; }

  Tensor operator()(const Tensor& x) const {
    Tensor y = matmul(x, weight);
    if (!bias.defined()) return y;
    return y.rank() == 2 ? add_rows(y, bias) : add(y, bias);
  }
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// Gates stacked as [input; forget; output; candidate] rows of one
// 4H x (in + H) matrix acting on [x; h].
struct LstmCell {
  Tensor weight;
  Tensor bias;
  std::size_t input_dim = 0;
  std::size_t hidden = 0;

  static LstmCell create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t hidden) {
    LstmCell c;
    c.weight = store.create(name + ".W", {4 * hidden, in + hidden});
    c.bias = store.create(name + ".b", {4 * hidden});
    c.input_dim = in;
    c.hidden = hidden;
    return c;
  }

  LstmState zero_state() const { return {Tensor::zeros({hidden}), Tensor::zeros({hidden})}; }

  LstmState step(const Tensor& x, const LstmState& s) const {
    if (x.size() != input_dim) {
      throw DimensionError("lstm step: input width " + std::to_string(x.size()) + " != " +
                           std::to_string(input_dim));
    }
    const std::size_t H = hidden;
    Tensor z = add(matmul(weight, concat({x, s.h})), bias);
    Tensor i = sigmoid(slice(z, 0, H));
    Tensor f = sigmoid(slice(z, H, 2 * H));
    Tensor o = sigmoid(slice(z, 2 * H, 3 * H));
    Tensor g = tanh(slice(z, 3 * H, 4 * H));
    Tensor c = add(mul(f, s.c), mul(i, g));
    return {mul(o, tanh(c)), c};
  }
};

struct EncodedSequence {
  Tensor states;  // T x H' (H' = 2H when bidirectional)
  Tensor final;   // H'

  std::size_t length() const { return states.shape()[0]; }
};

// Stacked (optionally bidirectional) LSTM. Layer l > 0 reads the
// concatenated states of layer l - 1.
struct LstmStack {
  std::vector<LstmCell> forward;
  std::vector<LstmCell> backward;  // empty when unidirectional

  static LstmStack create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                          std::size_t layers = 1, bool bidirectional = true) {
    LstmStack s;
    std::size_t width = in;
    for (std::size_t l = 0; l < layers; ++l) {
      const std::string p = name + ".l" + std::to_string(l);
      s.forward.push_back(LstmCell::create(store, p + ".fwd", width, hidden));
      if (bidirectional) s.backward.push_back(LstmCell::create(store, p + ".bwd", width, hidden));
      width = bidirectional ? 2 * hidden : hidden;
    }
    return s;
  }

  bool bidirectional() const { return !backward.empty(); }
  std::size_t hidden() const { return forward.front().hidden; }
  std::size_t output_dim() const { return bidirectional() ? 2 * hidden() : hidden(); }
  std::size_t input_dim() const { return forward.front().input_dim; }

  // inputs: T x in. Row t of the result is [fwd(x_0..x_t); bwd(x_t..x_{T-1})];
  // final = [fwd state after x_{T-1}; bwd state after x_0].
  EncodedSequence run(const Tensor& inputs) const {
    if (inputs.rank() != 2 || inputs.shape()[0] == 0) throw ContractError("lstm: empty input sequence");
    const std::size_t T = inputs.shape()[0];
    std::vector<Tensor> layer_in;
    layer_in.reserve(T);
    for (std::size_t t = 0; t < T; ++t) layer_in.push_back(row(inputs, t));

    EncodedSequence out;
    Tensor final;
    for (std::size_t l = 0; l < forward.size(); ++l) {
      std::vector<Tensor> fwd(T), bwd;
      LstmState s = forward[l].zero_state();
      for (std::size_t t = 0; t < T; ++t) {
        s = forward[l].step(layer_in[t], s);
        fwd[t] = s.h;
      }
      std::vector<Tensor> next(T);
      if (bidirectional()) {
        bwd.resize(T);
        LstmState b = backward[l].zero_state();
        for (std::size_t t = T; t-- > 0;) {
          b = backward[l].step(layer_in[t], b);
          bwd[t] = b.h;
        }
        for (std::size_t t = 0; t < T; ++t) next[t] = concat({fwd[t], bwd[t]});
        final = concat({fwd[T - 1], bwd[0]});
      } else {
        next = fwd;
        final = fwd[T - 1];
      }
      layer_in = std::move(next);
    }
    out.states = stack(layer_in);
    out.final = final;
    return out;
  }
};

inline std::vector<std::size_t> keep_last(std::vector<std::size_t> ids, std::size_t cap) {
  if (ids.size() > cap) ids.erase(ids.begin(), ids.end() - static_cast<std::ptrdiff_t>(cap));
  return ids;
}

// Embeds and encodes a token sequence, keeping only its last `cap` tokens.
inline EncodedSequence encode_tokens(const std::vector<std::size_t>& ids, const EmbeddingTable& table,
                                     const LstmStack& stack, std::size_t cap) {
  auto kept = keep_last(ids, cap);
  if (kept.empty()) throw ContractError("encode_tokens: empty sequence after truncation");
  return stack.run(table.lookup(kept));
}

inline EncodedSequence encode_tokens(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                                     const LstmStack& stack, std::size_t cap) {
  return encode_tokens(table.vocab.ids(tokens), table, stack, cap);
}

// m x D frame features (last `cap` rows kept) -> projection -> LSTM stack.
inline EncodedSequence encode_frames(const Tensor& frames, const Linear& projection, const LstmStack& stack,
                                     std::size_t cap = 60) {
  if (frames.rank() != 2 || frames.shape()[0] == 0) throw ContractError("encode_frames: no frames");
  if (frames.shape()[1] != projection.in_dim()) {
    throw DataError("encode_frames: feature dim " + std::to_string(frames.shape()[1]) + " != expected " +
                    std::to_string(projection.in_dim()));
  }
  const std::size_t m = frames.shape()[0];
  Tensor kept = m > cap ? slice_rows(frames, m - cap, m) : frames;
  return stack.run(projection(kept));
}

inline Tensor frames_tensor(const corpus::VideoSegment& seg) {
  if (seg.num_frames() == 0 || seg.frames.empty()) throw DataError("video segment has no frames loaded");
  return Tensor::matrix(seg.num_frames(), seg.dim, std::vector<double>(seg.frames.begin(), seg.frames.end()));
}

}  // namespace vidchat::encoders
