#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vidchat/attention/attention.hpp"
#include "vidchat/encoders/lstm.hpp"
#include "vidchat/encoders/vocab.hpp"
#include "vidchat/models/config.hpp"
#include "vidchat/models/dataset.hpp"
#include "vidchat/models/losses.hpp"

namespace vidchat::models {

struct Generation {
  std::vector<std::size_t> ids;
  std::vector<std::string> tokens;
  // Per step: distribution over video frames and over chat tokens (empty
  // when the variant does not attend to that side).
  std::vector<std::vector<double>> video_weights;
  std::vector<std::vector<double>> chat_weights;
};

// Encoder-attention-decoder. Two (optionally bidirectional) encoders, an
// LSTM decoder started from a projection of both encoder finals, bilinear
// attention over each encoder and the fusion tanh(W_c [c^v; c^u; h]). The
// bidaf variant first augments both encoders' states with their flows.
class GenerativeModel {
 public:
  // Decoder-side view of one (v, u) context.
  struct Context {
    Tensor video_keys;  // undefined when unused
    Tensor chat_keys;
    std::vector<encoders::LstmState> init;
  };

  GenerativeModel(GenerativeConfig cfg, encoders::Vocab vocab, std::uint64_t seed)
      : cfg_(std::move(cfg)), store_(seed, cfg_.dims.init_scale) {
    cfg_.validate();
    const Dims& d = cfg_.dims;
    const bool bi = cfg_.bidirectional_encoders;
    emb_ = encoders::EmbeddingTable::create(store_, "emb", std::move(vocab), d.emb_dim);
    const std::size_t state = bi ? 2 * d.hidden : d.hidden;
    const std::size_t key = cfg_.variant == GenerativeVariant::bidaf ? 2 * state : state;
    std::size_t finals = 0, fused = d.hidden;
    if (cfg_.uses_video()) {
      proj_ = encoders::Linear::create(store_, "video.proj", d.frame_dim, d.frame_proj);
      video_ = encoders::LstmStack::create(store_, "video.lstm", d.frame_proj, d.hidden, cfg_.layers, bi);
      att_v_ = store_.create("dec.att_video", {d.hidden, key});
      finals += state;
      fused += key;
    }
    if (cfg_.uses_chat()) {
      chat_ = encoders::LstmStack::create(store_, "chat.lstm", d.emb_dim, d.hidden, cfg_.layers, bi);
      att_u_ = store_.create("dec.att_chat", {d.hidden, key});
      finals += state;
      fused += key;
    }
    if (cfg_.variant == GenerativeVariant::bidaf) w_s_ = store_.create("bidaf.wS", {3 * state});
    decoder_ = encoders::LstmStack::create(store_, "dec.lstm", d.emb_dim, d.hidden, cfg_.layers, false);
    for (std::size_t l = 0; l < cfg_.layers; ++l) {
      init_.push_back(encoders::Linear::create(store_, "dec.init" + std::to_string(l), finals, d.hidden));
    }
    fuse_ = encoders::Linear::create(store_, "dec.fuse", fused, d.hidden, false);
    out_ = encoders::Linear::create(store_, "dec.out", d.hidden, emb_.vocab.size());
  }

  const GenerativeConfig& config() const { return cfg_; }
  const encoders::Vocab& vocab() const { return emb_.vocab; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  std::optional<encoders::EncodedSequence> encode_video(const Example& e) const {
    if (!cfg_.uses_video()) return std::nullopt;
    if (!e.frames.defined()) throw ConfigError("variant needs video features but instance " + e.id + " has none");
    return encoders::encode_frames(e.frames, proj_, video_, cfg_.dims.video_cap);
  }

  std::optional<encoders::EncodedSequence> encode_chat(const Example& e) const {
    if (!cfg_.uses_chat()) return std::nullopt;
    if (e.chat.empty()) throw ConfigError("variant needs chat context but instance " + e.id + " has none");
    return encoders::encode_tokens(e.chat, emb_, chat_, cfg_.dims.chat_cap);
  }

  Context make_context(const std::optional<encoders::EncodedSequence>& v,
                       const std::optional<encoders::EncodedSequence>& u, attention::Recorder* rec = nullptr) const {
    Context c;
    std::vector<Tensor> finals;
    if (v) {
      c.video_keys = v->states;
      finals.push_back(v->final);
    }
    if (u) {
      c.chat_keys = u->states;
      finals.push_back(u->final);
    }
    if (cfg_.variant == GenerativeVariant::bidaf) {
      auto f = attention::bidaf_flow(v->states, u->states, w_s_, rec, "bidaf");
      c.video_keys = concat({v->states, f.a_from_b}, 1);
      c.chat_keys = concat({u->states, f.b_from_a}, 1);
    }
    Tensor joined = finals.size() == 1 ? finals[0] : concat(finals);
    for (const auto& proj : init_) c.init.push_back({proj(joined), Tensor::zeros({cfg_.dims.hidden})});
    return c;
  }

  Context encode(const Example& e, attention::Recorder* rec = nullptr) const {
    return make_context(encode_video(e), encode_chat(e), rec);
  }

  // log p(r, <EOS> | context) under teacher forcing, as a scalar. Out-of-
  // vocabulary ids never occur: the vocabulary already maps them to <UNK>.
  Tensor response_log_prob(const Context& c, const std::vector<std::size_t>& response,
                           attention::Recorder* rec = nullptr) const {
    const auto r = truncate_response(response, cfg_.dims.response_cap);
    std::vector<std::size_t> inputs{encoders::kBos};
    inputs.insert(inputs.end(), r.begin(), r.end());
    std::vector<std::size_t> targets = r;
    targets.push_back(encoders::kEos);
    Tensor states = run_decoder(c, emb_.lookup(inputs));
    Tensor logp = log_softmax(output_logits(c, states, rec));
    return sum(pick_rows(logp, targets));
  }

  // Full T x |V| table of log-probabilities (rows sum to one in probability).
  Tensor step_log_probs(const Context& c, const std::vector<std::size_t>& response) const {
    std::vector<std::size_t> inputs{encoders::kBos};
    const auto r = truncate_response(response, cfg_.dims.response_cap);
    inputs.insert(inputs.end(), r.begin(), r.end());
    return log_softmax(output_logits(c, run_decoder(c, emb_.lookup(inputs)), nullptr));
  }

  Tensor xe_loss(const Example& e) const { return neg(response_log_prob(encode(e), e.response)); }

  // Retrieval score of a candidate: summed (or mean) token log-probability.
  std::vector<double> score_candidates(const Example& context,
                                       const std::vector<const std::vector<std::size_t>*>& responses) const {
    Context c = encode(context);
    std::vector<double> out;
    out.reserve(responses.size());
    for (const auto* r : responses) {
      double lp = response_log_prob(c, *r).item();
      if (cfg_.length_normalize) lp /= static_cast<double>(std::min(r->size(), cfg_.dims.response_cap) + 1);
      out.push_back(lp);
    }
    return out;
  }

  double score(const Example& context, const std::vector<std::size_t>& response) const {
    return score_candidates(context, {&response}).front();
  }

  // xe alone, or xe + λ·max-margin over the negatives that change an input
  // the variant reads.
  Tensor example_loss(const Dataset& data, std::size_t pos, const NegativeSet& negs) const {
    const Example& e = data[pos];
    auto v = encode_video(e);
    auto u = encode_chat(e);
    Context c = make_context(v, u);
    Tensor lp = response_log_prob(c, e.response);
    Tensor xe = neg(lp);
    if (cfg_.loss == GenerativeLoss::xe) return xe;
    std::vector<Tensor> neg_lp;
    if (negs.video && cfg_.uses_video()) {
      neg_lp.push_back(response_log_prob(make_context(encode_video(data[*negs.video]), u), e.response));
    }
    if (negs.chat && cfg_.uses_chat()) {
      neg_lp.push_back(response_log_prob(make_context(v, encode_chat(data[*negs.chat])), e.response));
    }
    if (negs.response) neg_lp.push_back(response_log_prob(c, data[*negs.response].response));
    return joint_loss(xe, generative_max_margin(lp, neg_lp, cfg_.margin), cfg_.lambda);
  }

  // Greedy decoding from <BOS> until <EOS> or max_len tokens.
  Generation generate(const Example& e, std::optional<std::size_t> max_len = std::nullopt,
                      attention::Recorder* rec = nullptr) const {
    const std::size_t limit = max_len.value_or(cfg_.max_decode_len);
    Generation g;
    if (limit == 0) return g;
    Context c = encode(e, rec);
    std::vector<encoders::LstmState> st = c.init;
    std::size_t prev = encoders::kBos;
    while (g.ids.size() < limit) {
      Tensor x = row(emb_.lookup(std::vector<std::size_t>{prev}), 0);
      for (std::size_t l = 0; l < decoder_.forward.size(); ++l) {
        st[l] = decoder_.forward[l].step(x, st[l]);
        x = st[l].h;
      }
      attention::Recorder step_rec;
      Tensor logits = output_logits(c, reshape(x, {1, cfg_.dims.hidden}), &step_rec);
      if (rec) rec->maps.insert(rec->maps.end(), step_rec.maps.begin(), step_rec.maps.end());
      std::size_t best = 0;
      for (std::size_t k = 1; k < logits.size(); ++k)
        if (logits[k] > logits[best]) best = k;
      if (best == encoders::kEos) break;
      for (auto& m : step_rec.maps) (m.name == "dec.video" ? g.video_weights : g.chat_weights).push_back(m.weights);
      g.ids.push_back(best);
      g.tokens.push_back(emb_.vocab.token(best));
      prev = best;
    }
    return g;
  }

 private:
  // Top-layer decoder states for a teacher-forced input sequence.
  Tensor run_decoder(const Context& c, const Tensor& inputs) const {
    std::vector<Tensor> layer_in;
    for (std::size_t t = 0; t < inputs.rows(); ++t) layer_in.push_back(row(inputs, t));
    for (std::size_t l = 0; l < decoder_.forward.size(); ++l) {
      encoders::LstmState s = c.init[l];
      for (auto& x : layer_in) {
        s = decoder_.forward[l].step(x, s);
        x = s.h;
      }
    }
    return stack(layer_in);
  }

  // T x |V| logits from T x H decoder states.
  Tensor output_logits(const Context& c, const Tensor& states, attention::Recorder* rec) const {
    std::vector<Tensor> parts;
    if (c.video_keys.defined()) {
      parts.push_back(attention::bilinear_attention_rows(states, c.video_keys, att_v_, rec, "dec.video").context);
    }
    if (c.chat_keys.defined()) {
      parts.push_back(attention::bilinear_attention_rows(states, c.chat_keys, att_u_, rec, "dec.chat").context);
    }
    parts.push_back(states);
    Tensor fused = tanh(fuse_(concat(parts, 1)));
    return out_(fused);
  }

  GenerativeConfig cfg_;
  ParameterStore store_;
  encoders::EmbeddingTable emb_;
  encoders::Linear proj_;
  encoders::LstmStack video_, chat_, decoder_;
  Tensor att_v_, att_u_, w_s_;
  std::vector<encoders::Linear> init_;
  encoders::Linear fuse_, out_;
};

}  // namespace vidchat::models
