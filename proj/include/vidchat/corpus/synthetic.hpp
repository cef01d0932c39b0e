#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidchat/corpus/features.hpp"
#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/numerics/random.hpp"

namespace vidchat::corpus {

// Topic-structured toy data. Every instance has a video topic, which shapes
// its frames, and a chat topic, which supplies its context words. The
// response names one word of each topic plus a filler word, so a model has
// to read both contexts to rank it.
struct SyntheticSpec {
  std::size_t instances = 50;
  std::size_t videos = 10;
  std::size_t frames = 6;
  std::size_t frame_dim = 8;
  std::size_t chat_utterances = 4;
  double noise = 0.3;
  std::uint64_t seed = 0;
  // Fixed, distinct topics per video instead of random ones per instance.
  // Material from any other video then differs in topic, which removes the
  // loss floor of indistinguishable negatives. Needs videos <= topic count.
  bool topic_per_video = false;
};

inline const std::vector<std::array<std::string, 4>>& synthetic_topics() {
  static const std::vector<std::array<std::string, 4>> topics = {
      {"goal", "scores", "net", "finish"}, {"save", "keeper", "hands", "block"},
      {"foul", "card", "ref", "dive"},     {"corner", "header", "box", "cross"},
      {"offside", "flag", "var", "line"},  {"miss", "post", "wide", "bar"},
      {"pass", "through", "assist", "ball"}, {"penalty", "spot", "kick", "pk"},
      {"sub", "bench", "coach", "change"},  {"crowd", "fans", "chant", "stadium"},
  };
  return topics;
}

inline const std::array<std::string, 6>& synthetic_fillers() {
  static const std::array<std::string, 6> words = {"lol", "wow", "gg", "omg", "nice", "kappa"};
  return words;
}

// Prototype frame of a topic; frames are the prototype plus uniform noise.
inline std::vector<float> synthetic_prototype(std::size_t topic, std::size_t dim, std::uint64_t seed) {
  Rng rng = make_rng(seed, "synthetic/prototype/" + std::to_string(topic));
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(uniform_real(rng, -1.0, 1.0));
  return v;
}

inline std::vector<DialogueTriple> synthetic_triples(const SyntheticSpec& spec) {
  if (spec.videos < 2 || spec.instances == 0 || spec.frames == 0 || spec.frame_dim == 0) {
    throw ConfigError("synthetic corpus needs >= 2 videos and positive sizes");
  }
  if (spec.topic_per_video && spec.videos > synthetic_topics().size()) {
    throw ConfigError("topic_per_video needs at most " + std::to_string(synthetic_topics().size()) + " videos");
  }
  const auto& topics = synthetic_topics();
  const auto& fillers = synthetic_fillers();
  Rng rng = make_rng(spec.seed, "synthetic/triples");
  auto pick = [&](const auto& arr) { return arr[uniform_index(rng, arr.size())]; };
  std::vector<DialogueTriple> out;
  for (std::size_t i = 0; i < spec.instances; ++i) {
    std::size_t vt = uniform_index(rng, topics.size());
    std::size_t ct = uniform_index(rng, topics.size());
    if (spec.topic_per_video) {
      vt = i % spec.videos;
      ct = (vt + 1) % spec.videos;
    }
    DialogueTriple t;
    t.video_id = "synth" + std::to_string(i % spec.videos);
    t.window_index = i / spec.videos;
    const double start = 30.0 * static_cast<double>(t.window_index);
    t.context_interval = {start, start + 20.0};
    t.response_interval = {start + 20.0, start + 30.0};
    for (std::size_t k = 0; k < spec.chat_utterances; ++k) {
      t.chat.push_back({"viewer" + std::to_string(uniform_index(rng, 20)), start + 4.0 * static_cast<double>(k),
                        {pick(topics[ct]), pick(fillers), pick(topics[ct])}});
    }
    t.response_tokens = {pick(topics[vt]), pick(topics[ct]), pick(fillers)};
    t.response_window = {t.response_tokens};
    t.features_path = "mem:" + t.video_id;
    t.video.dim = static_cast<std::uint32_t>(spec.frame_dim);
    t.video.row_begin = 0;
    t.video.row_end = static_cast<std::uint32_t>(spec.frames);
    t.video.start = start;
    t.video.end = start + 20.0;
    const auto proto = synthetic_prototype(vt, spec.frame_dim, spec.seed);
    for (std::size_t f = 0; f < spec.frames; ++f)
      for (std::size_t d = 0; d < spec.frame_dim; ++d)
        t.video.frames.push_back(proto[d] + static_cast<float>(uniform_real(rng, -spec.noise, spec.noise)));
    out.push_back(std::move(t));
  }
  return out;
}

// Raw inputs for the dataset builder: one chat log (JSON Lines) and one
// feature matrix per video, each 30-second period about one topic.
struct SyntheticVideo {
  std::string id;
  std::vector<nlohmann::json> chat_lines;
  FeatureMatrix features;
};

inline std::vector<SyntheticVideo> synthetic_videos(std::size_t videos, std::size_t periods, std::size_t frame_dim,
                                                    double fps, std::uint64_t seed) {
  const auto& topics = synthetic_topics();
  const auto& fillers = synthetic_fillers();
  std::vector<SyntheticVideo> out;
  for (std::size_t v = 0; v < videos; ++v) {
    Rng rng = make_rng(seed, "synthetic/video/" + std::to_string(v));
    auto pick = [&](const auto& arr) { return arr[uniform_index(rng, arr.size())]; };
    SyntheticVideo sv;
    sv.id = "match" + std::to_string(v);
    const auto rows = static_cast<std::uint32_t>(30.0 * static_cast<double>(periods) * fps);
    sv.features.rows = rows;
    sv.features.cols = static_cast<std::uint32_t>(frame_dim);
    sv.features.data.resize(static_cast<std::size_t>(rows) * frame_dim);
    for (std::size_t p = 0; p < periods; ++p) {
      const std::size_t topic = uniform_index(rng, topics.size());
      const auto proto = synthetic_prototype(topic, frame_dim, seed);
      const double start = 30.0 * static_cast<double>(p);
      const auto r0 = static_cast<std::size_t>(start * fps), r1 = static_cast<std::size_t>((start + 30.0) * fps);
      for (std::size_t r = r0; r < r1 && r < rows; ++r)
        for (std::size_t d = 0; d < frame_dim; ++d)
          sv.features.data[r * frame_dim + d] = proto[d] + static_cast<float>(uniform_real(rng, -0.3, 0.3));
      // Context: one line about every 3 s; response window: a few reactions.
      for (double t = start + 0.5; t < start + 20.0; t += 2.0 + uniform_real(rng, 0.0, 2.0)) {
        sv.chat_lines.push_back({{"time", t},
                                 {"user", "fan" + std::to_string(uniform_index(rng, 12))},
                                 {"text", pick(topics[topic]) + " " + pick(fillers) + " " + pick(topics[topic])}});
      }
      for (double t = start + 20.5; t < start + 30.0; t += 2.5 + uniform_real(rng, 0.0, 2.0)) {
        sv.chat_lines.push_back({{"time", t},
                                 {"user", "fan" + std::to_string(uniform_index(rng, 12))},
                                 {"text", pick(topics[topic]) + " " + pick(topics[topic]) + " " + pick(fillers)}});
      }
    }
    out.push_back(std::move(sv));
  }
  return out;
}

}  // namespace vidchat::corpus
