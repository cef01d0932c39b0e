#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include <json.hpp>

#include "vidchat/numerics/errors.hpp"

namespace vidchat::models {

enum class DiscriminativeVariant { dual_chat, dual_video, triple, tridaf };
enum class DiscriminativeLoss { max_margin, classification };
enum class GenerativeVariant { seq2seq_chat, seq2seq_video, seq2seq_both, bidaf };
enum class GenerativeLoss { xe, joint };

namespace detail {

template <class E, std::size_t N>
using EnumNames = std::array<std::pair<E, const char*>, N>;

template <class E, std::size_t N>
const char* enum_name(E e, const EnumNames<E, N>& names) {
  for (const auto& [v, n] : names)
    if (v == e) return n;
  throw ConfigError("unnamed enum value");
}

template <class E, std::size_t N>
E enum_parse(const std::string& s, const EnumNames<E, N>& names, const char* what) {
  for (const auto& [v, n] : names)
    if (s == n) return v;
  std::string allowed;
  for (const auto& [_, n] : names) allowed += std::string(allowed.empty() ? "" : ", ") + n;
  throw ConfigError(std::string("unknown ") + what + " '" + s + "' (expected one of: " + allowed + ")");
}

inline constexpr EnumNames<DiscriminativeVariant, 4> kDiscriminativeVariants{{
    {DiscriminativeVariant::dual_chat, "dual_chat"},
    {DiscriminativeVariant::dual_video, "dual_video"},
    {DiscriminativeVariant::triple, "triple"},
    {DiscriminativeVariant::tridaf, "tridaf"},
}};
inline constexpr EnumNames<DiscriminativeLoss, 2> kDiscriminativeLosses{{
    {DiscriminativeLoss::max_margin, "max_margin"},
    {DiscriminativeLoss::classification, "classification"},
}};
inline constexpr EnumNames<GenerativeVariant, 4> kGenerativeVariants{{
    {GenerativeVariant::seq2seq_chat, "seq2seq_chat"},
    {GenerativeVariant::seq2seq_video, "seq2seq_video"},
    {GenerativeVariant::seq2seq_both, "seq2seq_both"},
    {GenerativeVariant::bidaf, "bidaf"},
}};
inline constexpr EnumNames<GenerativeLoss, 2> kGenerativeLosses{{
    {GenerativeLoss::xe, "xe"},
    {GenerativeLoss::joint, "joint"},
}};

}  // namespace detail

#define VIDCHAT_STRICT_ENUM_JSON(Type, table, what)                                                    \
  inline std::string to_string(Type v) { return detail::enum_name(v, detail::table); }                \
  inline void to_json(nlohmann::json& j, Type v) { j = to_string(v); }                                 \
  inline void from_json(const nlohmann::json& j, Type& v) {                                            \
    if (!j.is_string()) throw ConfigError(std::string(what) + " must be a string");                    \
    v = detail::enum_parse(j.get<std::string>(), detail::table, what);                                 \
  }

VIDCHAT_STRICT_ENUM_JSON(DiscriminativeVariant, kDiscriminativeVariants, "discriminative variant")
VIDCHAT_STRICT_ENUM_JSON(DiscriminativeLoss, kDiscriminativeLosses, "discriminative loss")
VIDCHAT_STRICT_ENUM_JSON(GenerativeVariant, kGenerativeVariants, "generative variant")
VIDCHAT_STRICT_ENUM_JSON(GenerativeLoss, kGenerativeLosses, "generative loss")

#undef VIDCHAT_STRICT_ENUM_JSON

// Sizes shared by every model.
struct Dims {
  std::size_t emb_dim = 100;
  std::size_t hidden = 256;
  std::size_t frame_dim = 2048;
  std::size_t frame_proj = 256;
  std::size_t video_cap = 60;
  std::size_t chat_cap = 70;
  std::size_t response_cap = 10;
  std::size_t vocab_size = 27000;
  double init_scale = 0.08;

  void validate() const {
    if (!emb_dim || !hidden || !frame_dim || !frame_proj || !video_cap || !chat_cap || !response_cap) {
      throw ConfigError("dims: every size must be positive");
    }
    if (!(init_scale >= 0.0)) throw ConfigError("dims: init_scale must be >= 0");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Dims, emb_dim, hidden, frame_dim, frame_proj, video_cap, chat_cap,
                                                response_cap, vocab_size, init_scale)

struct DiscriminativeConfig {
  DiscriminativeVariant variant = DiscriminativeVariant::tridaf;
  DiscriminativeLoss loss = DiscriminativeLoss::max_margin;
  double margin = 0.1;
  std::size_t layers = 1;
  bool shared_similarity = false;
  Dims dims;

  bool uses_video() const { return variant != DiscriminativeVariant::dual_chat; }
  bool uses_chat() const { return variant != DiscriminativeVariant::dual_video; }

  void validate() const {
    if (!(margin > 0.0)) throw ConfigError("margin must be > 0");
    if (layers == 0) throw ConfigError("layers must be >= 1");
    dims.validate();
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DiscriminativeConfig, variant, loss, margin, layers,
                                                shared_similarity, dims)

struct GenerativeConfig {
  GenerativeVariant variant = GenerativeVariant::bidaf;
  GenerativeLoss loss = GenerativeLoss::joint;
  double lambda = 1.0;
  double margin = 0.1;
  std::size_t max_decode_len = 10;
  std::size_t layers = 2;
  bool bidirectional_encoders = true;
  // Rerank by mean instead of summed token log-probability.
  bool length_normalize = false;
  Dims dims;

  bool uses_video() const { return variant != GenerativeVariant::seq2seq_chat; }
  bool uses_chat() const { return variant != GenerativeVariant::seq2seq_video; }

  void validate() const {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (!(margin > 0.0)) throw ConfigError("margin must be > 0");
    if (layers == 0) throw ConfigError("layers must be >= 1");
    dims.validate();
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GenerativeConfig, variant, loss, lambda, margin, max_decode_len,
                                                layers, bidirectional_encoders, length_normalize, dims)

struct TrainConfig {
  double lr = 1e-4;
  std::size_t batch = 32;
  double clip_norm = 2.0;
  std::size_t epochs = 10;
  // 3: one wrong video, chat and response per positive; 1: wrong response only.
  std::size_t negatives = 3;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
    if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
    if (batch == 0) throw ConfigError("batch must be >= 1");
    if (negatives != 1 && negatives != 3) throw ConfigError("negatives must be 1 or 3");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, lr, batch, clip_norm, epochs, negatives, seed)

}  // namespace vidchat::models
