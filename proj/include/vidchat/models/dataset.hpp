#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/corpus/tokenizer.hpp"
#include "vidchat/encoders/lstm.hpp"
#include "vidchat/encoders/vocab.hpp"
#include "vidchat/models/config.hpp"
#include "vidchat/numerics/random.hpp"

namespace vidchat::models {

// One (v, u, r) instance in model-ready form.
struct Example {
  std::string id;
  std::string video_id;
  Tensor frames;                     // m x frame_dim; undefined when no features are attached
  std::vector<std::size_t> chat;     // <SEP>-joined context ids, last chat_cap kept
  std::vector<std::size_t> response; // first response_cap ids
  std::vector<std::string> response_tokens;
  std::vector<std::vector<std::string>> references;
};

using Dataset = std::vector<Example>;

inline std::string instance_id(const corpus::DialogueTriple& t) {
  return t.video_id + "#" + std::to_string(t.window_index);
}

inline std::vector<std::size_t> truncate_response(const std::vector<std::size_t>& ids, std::size_t cap) {
  return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(cap, ids.size()))};
}

// Frames are taken from t.video when loaded; otherwise the example has none.
inline Example make_example(const corpus::DialogueTriple& t, const encoders::Vocab& vocab, const Dims& dims) {
  Example e;
  e.id = instance_id(t);
  e.video_id = t.video_id;
  if (!t.video.frames.empty()) e.frames = encoders::frames_tensor(t.video);
  e.chat = encoders::keep_last(vocab.ids(encoders::concat_chat_context(t.chat, dims.chat_cap)), dims.chat_cap);
  e.response = truncate_response(vocab.ids(t.response_tokens), dims.response_cap);
  e.response_tokens = t.response_tokens;
  e.references = t.response_window.empty() ? std::vector<std::vector<std::string>>{t.response_tokens}
                                           : t.response_window;
  return e;
}

inline Dataset make_dataset(const std::vector<corpus::DialogueTriple>& triples, const encoders::Vocab& vocab,
                            const Dims& dims) {
  Dataset d;
  d.reserve(triples.size());
  for (const auto& t : triples) d.push_back(make_example(t, vocab, dims));
  return d;
}

// Indices (into the dataset) of the material swapped into each negative.
struct NegativeSet {
  std::optional<std::size_t> video;
  std::optional<std::size_t> chat;
  std::optional<std::size_t> response;
};

inline void require_multiple_videos(const Dataset& data) {
  std::set<std::string> ids;
  for (const auto& e : data) ids.insert(e.video_id);
  if (ids.size() < 2) throw DataError("negative sampling needs instances from at least 2 videos");
}

inline std::size_t other_video_count(const Dataset& data, std::size_t pos) {
  std::size_t n = 0;
  for (const auto& e : data) n += e.video_id != data[pos].video_id;
  return n;
}

inline std::size_t draw_other_video(const Dataset& data, std::size_t pos, Rng& rng) {
  for (;;) {
    const std::size_t i = uniform_index(rng, data.size());
    if (data[i].video_id != data[pos].video_id) return i;
  }
}

// Training negatives: wrong video, chat and response (count 3) or a wrong
// response only (count 1), each from an instance of a different video.
inline NegativeSet sample_negatives(const Dataset& data, std::size_t pos, std::size_t count, Rng& rng) {
  if (count != 1 && count != 3) throw ConfigError("negative count must be 1 or 3");
  if (other_video_count(data, pos) == 0) {
    throw DataError("negative sampling: every instance shares the video of " + data[pos].id);
  }
  NegativeSet n;
  if (count == 3) {
    n.video = draw_other_video(data, pos, rng);
    n.chat = draw_other_video(data, pos, rng);
  }
  n.response = draw_other_video(data, pos, rng);
  return n;
}

inline constexpr std::size_t kListSize = 10;

// A 10-way retrieval list: candidates[positive_index] == the instance itself.
struct CandidateList {
  std::size_t instance = 0;
  std::vector<std::size_t> candidates;
  std::size_t positive_index = 0;
  std::uint64_t seed = 0;
};

// Nine responses from other videos (distinct instances when enough exist)
// plus the positive at a uniformly drawn position. The draw depends only on
// (seed, instance), never on evaluation order.
inline CandidateList sample_eval_list(const Dataset& data, std::size_t pos, std::uint64_t seed) {
  const std::size_t pool = other_video_count(data, pos);
  if (pool == 0) throw DataError("negative sampling: every instance shares the video of " + data[pos].id);
  Rng rng = make_rng(seed, "eval/" + std::to_string(pos));
  const bool distinct = pool >= kListSize - 1;
  std::vector<std::size_t> negs;
  while (negs.size() < kListSize - 1) {
    const std::size_t i = draw_other_video(data, pos, rng);
    if (distinct && std::find(negs.begin(), negs.end(), i) != negs.end()) continue;
    negs.push_back(i);
  }
  CandidateList list;
  list.instance = pos;
  list.seed = seed;
  list.positive_index = uniform_index(rng, kListSize);
  list.candidates = negs;
  list.candidates.insert(list.candidates.begin() + static_cast<std::ptrdiff_t>(list.positive_index), pos);
  return list;
}

}  // namespace vidchat::models
