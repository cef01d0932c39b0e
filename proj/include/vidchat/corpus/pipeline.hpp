#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidchat/corpus/bleu.hpp"
#include "vidchat/corpus/chat_log.hpp"
#include "vidchat/corpus/features.hpp"
#include "vidchat/corpus/tokenizer.hpp"

namespace vidchat::corpus {

inline const std::string kUserTag = "<USER>";

struct PipelineConfig {
  double context_secs = 20.0;
  double response_secs = 10.0;
  double bleu_threshold = 0.5;
  std::size_t n_frequent = 20;
  std::size_t min_context_utts = 4;
  double fps = 3.0;
  std::size_t max_video_steps = 60;
  BleuSmoothing smoothing = BleuSmoothing::add_one;

  void validate() const {
    if (!(context_secs > 0) || !(response_secs > 0) || !(bleu_threshold > 0) || n_frequent == 0 ||
        min_context_utts == 0 || !(fps > 0) || max_video_steps == 0) {
      throw ConfigError("pipeline config: all values must be positive");
    }
    if (response_secs > context_secs) throw ConfigError("pipeline config: response_secs > context_secs");
  }
};

NLOHMANN_JSON_SERIALIZE_ENUM(BleuSmoothing, {{BleuSmoothing::none, "unsmoothed"},
                                             {BleuSmoothing::add_one, "add-one"},
                                             {BleuSmoothing::add_one_all, "add-one-all"}})

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"context_secs", c.context_secs},     {"response_secs", c.response_secs},
                     {"bleu_threshold", c.bleu_threshold}, {"n_frequent", c.n_frequent},
                     {"min_context_utts", c.min_context_utts}, {"fps", c.fps},
                     {"max_video_steps", c.max_video_steps}, {"bleu_smoothing", c.smoothing}};
}

inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
  c.context_secs = j.value("context_secs", c.context_secs);
  c.response_secs = j.value("response_secs", c.response_secs);
  c.bleu_threshold = j.value("bleu_threshold", c.bleu_threshold);
  c.n_frequent = j.value("n_frequent", c.n_frequent);
  c.min_context_utts = j.value("min_context_utts", c.min_context_utts);
  c.fps = j.value("fps", c.fps);
  c.max_video_steps = j.value("max_video_steps", c.max_video_steps);
  c.smoothing = j.value("bleu_smoothing", c.smoothing);
}

// Half-open [begin, end) in seconds.
struct Interval {
  double begin = 0.0;
  double end = 0.0;
  bool contains(double t) const { return t >= begin && t < end; }
  bool operator==(const Interval&) const = default;
};

inline std::string to_string(const Interval& iv) {
  std::ostringstream os;
  os << '[' << iv.begin << ',' << iv.end << ')';
  return os.str();
}

struct WindowPair {
  Interval context;
  Interval response;
  bool operator==(const WindowPair&) const = default;
};

// Non-overlapping tiling from t=0: instance k has context
// [k*P, k*P + context) and response [k*P + context, (k+1)*P) where
// P = context + response. Partial trailing instances are dropped.
inline std::vector<WindowPair> segment_windows(double duration, const PipelineConfig& cfg) {
  std::vector<WindowPair> out;
  const double period = cfg.context_secs + cfg.response_secs;
  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * period;
    if (start + period > duration + 1e-9) break;
    out.push_back({{start, start + cfg.context_secs}, {start + cfg.context_secs, start + period}});
  }
  return out;
}

// Tokens naming a known speaker, or any @-mention, become <USER>.
inline Utterance anonymize(Utterance utt, const std::set<std::string>& known_speakers) {
  for (auto& tok : utt.tokens) {
    const bool mention = tok.size() > 1 && tok[0] == '@';
    if (mention || known_speakers.count(tok)) tok = kUserTag;
  }
  return utt;
}

// The n most frequent normalized utterances; ties go to the lexicographically smaller string.
inline std::set<std::string> top_frequent_utterances(const std::vector<Utterance>& training_utts,
                                                     std::size_t n = 20) {
  std::map<std::string, std::size_t> counts;
  for (const auto& u : training_utts) ++counts[join_tokens(u.tokens)];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::set<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < n; ++i) out.insert(ranked[i].first);
  return out;
}

enum class SelectionReason { bleu_match, fallback_first };

NLOHMANN_JSON_SERIALIZE_ENUM(SelectionReason, {{SelectionReason::bleu_match, "bleu_match"},
                                               {SelectionReason::fallback_first, "fallback_first"}})

struct Selection {
  std::size_t index = 0;  // position in the response window
  std::vector<std::string> tokens;
  SelectionReason reason = SelectionReason::bleu_match;
};

// Earliest utterance whose BLEU-4 against some other utterance in the
// window reaches the threshold. Frequent utterances are only considered
// when no other utterance qualifies; with no match at all the first
// utterance is taken.
inline std::optional<Selection> select_response(const std::vector<Utterance>& window_utts,
                                                const std::set<std::string>& frequent_set,
                                                const PipelineConfig& cfg) {
  if (window_utts.empty()) return std::nullopt;
  auto matches_other = [&](std::size_t i) {
    for (std::size_t j = 0; j < window_utts.size(); ++j) {
      if (j == i) continue;
      if (compute_bleu4(window_utts[i].tokens, window_utts[j].tokens, cfg.smoothing) >= cfg.bleu_threshold) {
        return true;
      }
    }
    return false;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < window_utts.size(); ++i) {
      const bool frequent = frequent_set.count(join_tokens(window_utts[i].tokens)) > 0;
      if (pass == 0 && frequent) continue;
      if (matches_other(i)) return Selection{i, window_utts[i].tokens, SelectionReason::bleu_match};
    }
  }
  return Selection{0, window_utts.front().tokens, SelectionReason::fallback_first};
}

// Drops response-window utterances that mention a user who did not speak in
// the context window: either a bare id from the log's speaker set or any @-mention.
inline std::vector<Utterance> drop_out_of_context_mentions(const std::vector<Utterance>& window,
                                                           const std::set<std::string>& all_speakers,
                                                           const std::set<std::string>& context_speakers) {
  std::vector<Utterance> out;
  for (const auto& u : window) {
    bool refers_outside = false;
    for (const auto& tok : u.tokens) {
      const bool mention = tok.size() > 1 && tok[0] == '@';
      const std::string name = mention ? tok.substr(1) : tok;
      if (context_speakers.count(name)) continue;
      if (mention || all_speakers.count(name)) {
        refers_outside = true;
        break;
      }
    }
    if (!refers_outside) out.push_back(u);
  }
  return out;
}

struct VideoSegment {
  std::uint32_t row_begin = 0;
  std::uint32_t row_end = 0;
  std::uint32_t dim = 0;
  std::vector<float> frames;  // (row_end - row_begin) x dim
  double start = 0.0;
  double end = 0.0;

  std::size_t num_frames() const { return row_end - row_begin; }
};

struct DialogueTriple {
  std::string video_id;
  std::size_t window_index = 0;
  Interval context_interval;
  Interval response_interval;
  std::vector<Utterance> chat;
  std::vector<std::string> response_tokens;
  SelectionReason selection_reason = SelectionReason::bleu_match;
  // Every (anonymized) utterance of the response window; references for phrase metrics.
  std::vector<std::vector<std::string>> response_window;
  std::string features_path;
  VideoSegment video;
};

inline std::set<std::string> speaker_set(const std::vector<Utterance>& utts) {
  std::set<std::string> s;
  for (const auto& u : utts) s.insert(to_lower(u.speaker));
  return s;
}

inline std::uint32_t frame_index_at(double t, double fps) {
  return static_cast<std::uint32_t>(std::ceil(t * fps - 1e-9));
}

// All instances of one video, in window order.
inline std::vector<DialogueTriple> build_triples(const std::string& video_id,
                                                 const std::vector<Utterance>& utterances,
                                                 const FrameStore& frame_store, const PipelineConfig& cfg,
                                                 const std::set<std::string>& frequent_set) {
  cfg.validate();
  const auto features = frame_store.load(video_id);
  double duration = features ? features->rows / cfg.fps : 0.0;
  if (!utterances.empty()) duration = std::max(duration, utterances.back().time);
  const auto all_speakers = speaker_set(utterances);

  std::vector<DialogueTriple> out;
  const auto windows = segment_windows(duration, cfg);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto& w = windows[k];
    std::vector<Utterance> context, response;
    for (const auto& u : utterances) {
      if (w.context.contains(u.time)) context.push_back(u);
      else if (w.response.contains(u.time)) response.push_back(u);
    }
    if (context.size() < cfg.min_context_utts) continue;
    const auto context_speakers = speaker_set(context);
    response = drop_out_of_context_mentions(response, all_speakers, context_speakers);
    auto picked = select_response(response, frequent_set, cfg);
    if (!picked) continue;

    const std::uint32_t rb = frame_index_at(w.context.begin, cfg.fps);
    const std::uint32_t re = frame_index_at(w.context.end, cfg.fps);
    if (!features || re > features->rows || rb >= re) {
      throw DataError("video " + video_id + ": no features for context interval " + to_string(w.context));
    }

    DialogueTriple t;
    t.video_id = video_id;
    t.window_index = k;
    t.context_interval = w.context;
    t.response_interval = w.response;
    for (auto& u : context) t.chat.push_back(anonymize(u, context_speakers));
    for (auto& u : response) t.response_window.push_back(anonymize(u, context_speakers).tokens);
    t.response_tokens = t.response_window[picked->index];
    t.selection_reason = picked->reason;
    t.features_path = frame_store.path_of(video_id);
    t.video.row_begin = rb;
    t.video.row_end = re;
    t.video.dim = features->cols;
    t.video.start = w.context.begin;
    t.video.end = w.context.end;
    t.video.frames.assign(features->data.begin() + static_cast<std::size_t>(rb) * features->cols,
                          features->data.begin() + static_cast<std::size_t>(re) * features->cols);
    out.push_back(std::move(t));
  }
  return out;
}

// ------------------------------------------------------------- JSON Lines I/O

inline nlohmann::json triple_to_json(const DialogueTriple& t) {
  return nlohmann::json{
      {"video_id", t.video_id},
      {"window_index", t.window_index},
      {"context_interval", {t.context_interval.begin, t.context_interval.end}},
      {"response_interval", {t.response_interval.begin, t.response_interval.end}},
      {"chat", t.chat},
      {"response_tokens", t.response_tokens},
      {"selection_reason", t.selection_reason},
      {"response_window", t.response_window},
      {"features_path", t.features_path},
      {"row_range", {t.video.row_begin, t.video.row_end}},
  };
}

// Frames are not part of the record; see load_segment.
inline DialogueTriple triple_from_json(const nlohmann::json& j) {
  DialogueTriple t;
  j.at("video_id").get_to(t.video_id);
  j.at("window_index").get_to(t.window_index);
  t.context_interval = {j.at("context_interval")[0].get<double>(), j.at("context_interval")[1].get<double>()};
  t.response_interval = {j.at("response_interval")[0].get<double>(), j.at("response_interval")[1].get<double>()};
  j.at("chat").get_to(t.chat);
  j.at("response_tokens").get_to(t.response_tokens);
  j.at("selection_reason").get_to(t.selection_reason);
  if (j.contains("response_window")) j.at("response_window").get_to(t.response_window);
  if (t.response_window.empty()) t.response_window.push_back(t.response_tokens);
  j.at("features_path").get_to(t.features_path);
  t.video.row_begin = j.at("row_range")[0].get<std::uint32_t>();
  t.video.row_end = j.at("row_range")[1].get<std::uint32_t>();
  t.video.start = t.context_interval.begin;
  t.video.end = t.context_interval.end;
  return t;
}

inline void write_triples(std::ostream& os, const std::vector<DialogueTriple>& triples) {
  for (const auto& t : triples) os << triple_to_json(t).dump() << '\n';
}

inline std::vector<DialogueTriple> read_triples(std::istream& is) {
  std::vector<DialogueTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(triple_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("triple file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// Fills t.video.frames from its features file (loaded once per path via cache).
inline void load_segment(DialogueTriple& t, std::map<std::string, FeatureMatrix>& cache) {
  auto it = cache.find(t.features_path);
  if (it == cache.end()) it = cache.emplace(t.features_path, load_vfea(t.features_path)).first;
  const FeatureMatrix& m = it->second;
  if (t.video.row_end > m.rows || t.video.row_begin >= t.video.row_end) {
    throw DataError(t.features_path + ": row range out of bounds for " + t.video_id);
  }
  t.video.dim = m.cols;
  t.video.frames.assign(m.data.begin() + static_cast<std::size_t>(t.video.row_begin) * m.cols,
                        m.data.begin() + static_cast<std::size_t>(t.video.row_end) * m.cols);
}

}  // namespace vidchat::corpus
