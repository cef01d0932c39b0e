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

// Scores p(v, u, r) = σ(cᵀ W r + b). For the encoder variants c and r are
// LSTM finals (c drops the unused modality for the dual encoders); for
// TriDAF they are self-attended, flow-augmented states.
class DiscriminativeModel {
 public:
  DiscriminativeModel(DiscriminativeConfig cfg, encoders::Vocab vocab, std::uint64_t seed)
      : cfg_(std::move(cfg)), store_(seed, cfg_.dims.init_scale) {
    cfg_.validate();
    const Dims& d = cfg_.dims;
    emb_ = encoders::EmbeddingTable::create(store_, "emb", std::move(vocab), d.emb_dim);
    if (cfg_.uses_video()) {
      proj_ = encoders::Linear::create(store_, "video.proj", d.frame_dim, d.frame_proj);
      video_ = encoders::LstmStack::create(store_, "video.lstm", d.frame_proj, d.hidden, cfg_.layers);
    }
    if (cfg_.uses_chat()) chat_ = encoders::LstmStack::create(store_, "chat.lstm", d.emb_dim, d.hidden, cfg_.layers);
    response_ = encoders::LstmStack::create(store_, "response.lstm", d.emb_dim, d.hidden, cfg_.layers);
    const std::size_t state = 2 * d.hidden;
    std::size_t ctx = 0, resp = state;
    if (cfg_.variant == DiscriminativeVariant::tridaf) {
      flow_ = attention::FlowParams::create(store_, "tridaf", state, cfg_.shared_similarity);
      ctx = 6 * state;
      resp = 3 * state;
    } else {
      ctx = (cfg_.uses_video() ? state : 0) + (cfg_.uses_chat() ? state : 0);
    }
    w_ = store_.create("score.W", {ctx, resp});
    b_ = store_.create("score.b", {1});
  }

  const DiscriminativeConfig& config() const { return cfg_; }
  const encoders::Vocab& vocab() const { return emb_.vocab; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  encoders::EncodedSequence encode_video(const Example& e) const {
    if (!e.frames.defined()) throw ConfigError("variant needs video features but instance " + e.id + " has none");
    return encoders::encode_frames(e.frames, proj_, video_, cfg_.dims.video_cap);
  }

  encoders::EncodedSequence encode_chat(const Example& e) const {
    if (e.chat.empty()) throw ConfigError("variant needs chat context but instance " + e.id + " has none");
    return encoders::encode_tokens(e.chat, emb_, chat_, cfg_.dims.chat_cap);
  }

  encoders::EncodedSequence encode_response(const std::vector<std::size_t>& ids) const {
    return encoders::encode_tokens(ids, emb_, response_, cfg_.dims.response_cap);
  }

  // Pre-sigmoid score. v or u may be null when the variant ignores them.
  Tensor logit(const encoders::EncodedSequence* v, const encoders::EncodedSequence* u,
               const encoders::EncodedSequence& r, attention::Recorder* rec = nullptr) const {
    if (cfg_.uses_video() && !v) throw ConfigError("variant needs the video context");
    if (cfg_.uses_chat() && !u) throw ConfigError("variant needs the chat context");
    Tensor ctx, resp;
    if (cfg_.variant == DiscriminativeVariant::tridaf) {
      auto aug = attention::augment_states_tridaf(v->states, u->states, r.states, flow_, rec);
      ctx = concat({attention::self_attend(aug.video, flow_.self_v, rec, "self.video").vector,
                    attention::self_attend(aug.chat, flow_.self_u, rec, "self.chat").vector});
      resp = attention::self_attend(aug.response, flow_.self_r, rec, "self.response").vector;
    } else {
      std::vector<Tensor> parts;
      if (cfg_.uses_video()) parts.push_back(v->final);
      if (cfg_.uses_chat()) parts.push_back(u->final);
      ctx = parts.size() == 1 ? parts[0] : concat(parts);
      resp = r.final;
    }
    return add(matmul(matmul(ctx, w_), resp), b_);
  }

  // p(v, u, r) for the context of `context` and the given response ids.
  double score(const Example& context, const std::vector<std::size_t>& response,
               attention::Recorder* rec = nullptr) const {
    auto enc = encode_context(context);
    return sigmoid_value(logit(enc.v ? &*enc.v : nullptr, enc.u ? &*enc.u : nullptr, encode_response(response), rec)
                             .item());
  }

  // Probabilities for several candidate responses sharing one context.
  std::vector<double> score_candidates(const Example& context,
                                       const std::vector<const std::vector<std::size_t>*>& responses) const {
    auto enc = encode_context(context);
    std::vector<double> out;
    out.reserve(responses.size());
    for (const auto* r : responses) {
      out.push_back(
          sigmoid_value(logit(enc.v ? &*enc.v : nullptr, enc.u ? &*enc.u : nullptr, encode_response(*r)).item()));
    }
    return out;
  }

  // Loss of one positive against its negatives. Swapping a modality the
  // variant ignores would give a constant hinge, so such negatives are skipped.
  Tensor example_loss(const Dataset& data, std::size_t pos, const NegativeSet& negs) const {
    const Example& e = data[pos];
    auto enc = encode_context(e);
    const auto* v = enc.v ? &*enc.v : nullptr;
    const auto* u = enc.u ? &*enc.u : nullptr;
    auto r = encode_response(e.response);
    Tensor pos_logit = logit(v, u, r);
    std::vector<Tensor> neg_logits;
    if (negs.video && cfg_.uses_video()) {
      auto vn = encode_video(data[*negs.video]);
      neg_logits.push_back(logit(&vn, u, r));
    }
    if (negs.chat && cfg_.uses_chat()) {
      auto un = encode_chat(data[*negs.chat]);
      neg_logits.push_back(logit(v, &un, r));
    }
    if (negs.response) neg_logits.push_back(logit(v, u, encode_response(data[*negs.response].response)));
    if (cfg_.loss == DiscriminativeLoss::classification) return classification_loss(pos_logit, neg_logits);
    std::vector<Tensor> neg_lp;
    for (const auto& z : neg_logits) neg_lp.push_back(log_prob_from_logit(z));
    return max_margin_loss(log_prob_from_logit(pos_logit), neg_lp, cfg_.margin);
  }

 private:
  struct ContextEnc {
    std::optional<encoders::EncodedSequence> v, u;
  };

  ContextEnc encode_context(const Example& e) const {
    ContextEnc c;
    if (cfg_.uses_video()) c.v = encode_video(e);
    if (cfg_.uses_chat()) c.u = encode_chat(e);
    return c;
  }

  DiscriminativeConfig cfg_;
  ParameterStore store_;
  encoders::EmbeddingTable emb_;
  encoders::Linear proj_;
  encoders::LstmStack video_, chat_, response_;
  attention::FlowParams flow_;
  Tensor w_, b_;
};

}  // namespace vidchat::models
