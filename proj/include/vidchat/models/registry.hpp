#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vidchat/models/checkpoint.hpp"
#include "vidchat/models/discriminative.hpp"
#include "vidchat/models/generative.hpp"

namespace vidchat::models {

using AnyModel = std::variant<DiscriminativeModel, GenerativeModel>;

// Scores every candidate response against one context; higher is better.
using Scorer = std::function<std::vector<double>(const Example&, const std::vector<const std::vector<std::size_t>*>&)>;

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"dual_chat",     "dual_video",   "triple", "tridaf",
                                                 "seq2seq_chat", "seq2seq_video", "seq2seq_both", "bidaf"};
  return names;
}

inline bool is_generative_name(const std::string& name) { return name.rfind("seq2seq", 0) == 0 || name == "bidaf"; }

// Builds a model from a name and an optional config object; the name sets
// the variant and overrides any "variant" key.
inline AnyModel make_model(const std::string& name, const nlohmann::json& config, encoders::Vocab vocab,
                           std::uint64_t seed) {
  nlohmann::json cfg = config.is_null() ? nlohmann::json::object() : config;
  cfg["variant"] = name;
  try {
    if (is_generative_name(name)) return GenerativeModel(cfg.get<GenerativeConfig>(), std::move(vocab), seed);
    return DiscriminativeModel(cfg.get<DiscriminativeConfig>(), std::move(vocab), seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
}

inline bool is_generative(const AnyModel& m) { return std::holds_alternative<GenerativeModel>(m); }

inline ParameterStore& model_params(AnyModel& m) {
  return std::visit([](auto& x) -> ParameterStore& { return x.params(); }, m);
}

inline const encoders::Vocab& model_vocab(const AnyModel& m) {
  return std::visit([](const auto& x) -> const encoders::Vocab& { return x.vocab(); }, m);
}

inline nlohmann::json model_header(const AnyModel& m, std::uint64_t seed) {
  nlohmann::json h;
  std::visit(
      [&](const auto& x) {
        h["kind"] = is_generative(m) ? "generative" : "discriminative";
        h["config"] = x.config();
        h["vocab"] = x.vocab().tokens();
      },
      m);
  h["seed"] = seed;
  return h;
}

inline AnyModel model_from_header(const nlohmann::json& h) {
  try {
    const auto kind = h.at("kind").get<std::string>();
    encoders::Vocab vocab(h.at("vocab").get<std::vector<std::string>>());
    const auto seed = h.at("seed").get<std::uint64_t>();
    if (kind == "generative") return GenerativeModel(h.at("config").get<GenerativeConfig>(), std::move(vocab), seed);
    if (kind == "discriminative") {
      return DiscriminativeModel(h.at("config").get<DiscriminativeConfig>(), std::move(vocab), seed);
    }
    throw ConfigError("checkpoint kind '" + kind + "' is not a response model");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad checkpoint header: ") + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, AnyModel& m, std::uint64_t seed) {
  save_checkpoint(path, model_header(m, seed), model_params(m));
}

inline AnyModel load_model(const std::filesystem::path& path) {
  Checkpoint ck = load_checkpoint(path);
  AnyModel m = model_from_header(ck.header);
  apply_checkpoint(ck, model_params(m));
  return m;
}

inline Scorer model_scorer(const AnyModel& m) {
  return [&m](const Example& ctx, const std::vector<const std::vector<std::size_t>*>& rs) {
    return std::visit([&](const auto& x) { return x.score_candidates(ctx, rs); }, m);
  };
}

}  // namespace vidchat::models
