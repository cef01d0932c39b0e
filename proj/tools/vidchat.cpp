#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vidchat/baselines/classifiers.hpp"
#include "vidchat/baselines/lm.hpp"
#include "vidchat/baselines/rankers.hpp"
#include "vidchat/cli/attention_export.hpp"
#include "vidchat/cli/manifest.hpp"
#include "vidchat/corpus/chat_log.hpp"
#include "vidchat/corpus/features.hpp"
#include "vidchat/corpus/pipeline.hpp"
#include "vidchat/corpus/stats.hpp"
#include "vidchat/corpus/synthetic.hpp"
#include "vidchat/eval/generation.hpp"
#include "vidchat/eval/retrieval.hpp"
#include "vidchat/models/registry.hpp"
#include "vidchat/models/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vidchat;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kNumeric = 3 };

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

json config_section(const json& cfg, const std::string& key) {
  return cfg.contains(key) ? cfg.at(key) : json::object();
}

// A misspelled key would otherwise fall back to its default silently.
void reject_unknown_keys(const json& given, const json& known, const std::string& where) {
  if (!given.is_object() || !known.is_object()) return;
  for (const auto& [k, v] : given.items()) {
    if (!known.contains(k)) throw ConfigError("unknown config key '" + where + k + "'");
    reject_unknown_keys(v, known.at(k), where + k + ".");
  }
}

template <class T>
T parse_section(const json& cfg, const std::string& key) {
  try {
    T value = config_section(cfg, key).get<T>();
    reject_unknown_keys(config_section(cfg, key), json(value), key + ".");
    return value;
  } catch (const json::exception& e) {
    throw ConfigError("config section '" + key + "': " + e.what());
  }
}

void write_json_file(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw DataError("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

std::vector<corpus::DialogueTriple> load_triples(const fs::path& path, bool with_frames) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  auto triples = corpus::read_triples(in);
  if (with_frames) {
    std::map<std::string, corpus::FeatureMatrix> cache;
    for (auto& t : triples) corpus::load_segment(t, cache);
  }
  return triples;
}

// Model dims with frame_dim taken from the data unless the config sets it.
models::Dims dims_for(const json& model_cfg, const std::vector<corpus::DialogueTriple>& triples) {
  models::Dims d = model_cfg.contains("dims") ? model_cfg.at("dims").get<models::Dims>() : models::Dims{};
  if (!triples.empty() && !triples.front().video.frames.empty()) {
    const std::size_t data_dim = triples.front().video.dim;
    const bool explicit_dim = model_cfg.contains("dims") && model_cfg.at("dims").contains("frame_dim");
    if (explicit_dim && d.frame_dim != data_dim) {
      throw ConfigError("config frame_dim " + std::to_string(d.frame_dim) + " but features have width " +
                        std::to_string(data_dim));
    }
    d.frame_dim = data_dim;
  }
  return d;
}

// At least one dataset token must be known to the checkpoint's vocabulary.
void check_vocab(const encoders::Vocab& vocab, const std::vector<corpus::DialogueTriple>& triples) {
  for (const auto& t : triples) {
    for (const auto& w : t.response_tokens)
      if (vocab.contains(w)) return;
    for (const auto& u : t.chat)
      for (const auto& w : u.tokens)
        if (vocab.contains(w)) return;
  }
  if (!triples.empty()) throw ConfigError("vocabulary mismatch: no dataset token is known to the checkpoint");
}

std::size_t find_instance(const models::Dataset& data, const std::string& id) {
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].id == id) return i;
  throw DataError("no instance " + id + " in the dataset");
}

std::string join(const std::vector<std::string>& toks) {
  std::string s;
  for (const auto& t : toks) s += (s.empty() ? "" : " ") + t;
  return s;
}

bool model_uses_video(const models::AnyModel& m) {
  return std::visit([](const auto& x) { return x.config().uses_video(); }, m);
}

// ------------------------------------------------------------------ commands

int cmd_synth(const fs::path& out, std::size_t videos, std::size_t periods, std::size_t frame_dim, double fps,
              std::uint64_t seed) {
  cli::RunManifest manifest("synth", seed);
  manifest.config({{"videos", videos}, {"periods", periods}, {"frame_dim", frame_dim}, {"fps", fps}});
  fs::create_directories(out / "chat");
  fs::create_directories(out / "features");
  for (const auto& v : corpus::synthetic_videos(videos, periods, frame_dim, fps, seed)) {
    std::ofstream os(out / "chat" / (v.id + ".jsonl"));
    for (const auto& line : v.chat_lines) os << line.dump() << '\n';
    corpus::save_vfea(out / "features" / (v.id + ".vfea"), v.features);
  }
  manifest.output(out / "chat");
  manifest.output(out / "features");
  manifest.write(out / "manifest.json");
  std::cout << "wrote " << videos << " videos to " << out.string() << '\n';
  return kOk;
}

int cmd_build_dataset(const fs::path& chat_dir, const fs::path& feat_dir, const fs::path& out,
                      const std::optional<fs::path>& config_path, const std::string& split,
                      const std::optional<fs::path>& frequent_path, std::uint64_t seed) {
  const json cfg = config_path ? read_json_file(*config_path) : json::object();
  const auto pcfg = parse_section<corpus::PipelineConfig>(cfg, "pipeline");
  pcfg.validate();
  cli::RunManifest manifest("build-dataset", seed);
  manifest.config({{"pipeline", pcfg}, {"split", split}});
  if (config_path) manifest.input(*config_path);
  manifest.input(chat_dir);
  manifest.input(feat_dir);

  std::vector<fs::path> logs;
  for (const auto& e : fs::directory_iterator(chat_dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") logs.push_back(e.path());
  std::sort(logs.begin(), logs.end());
  if (logs.empty()) throw DataError("no .jsonl chat logs in " + chat_dir.string());

  std::vector<std::pair<std::string, corpus::ChatLog>> parsed;
  std::vector<corpus::Utterance> all_utts;
  for (const auto& p : logs) {
    std::ifstream in(p);
    try {
      parsed.emplace_back(p.stem().string(), corpus::parse_chat_log(in));
    } catch (const DataError& e) {
      throw DataError(p.string() + ": " + e.what());
    }
    const auto& u = parsed.back().second.utterances;
    all_utts.insert(all_utts.end(), u.begin(), u.end());
  }

  std::set<std::string> frequent;
  const fs::path frequent_out = out.string() + ".frequent.json";
  if (split == "train") {
    frequent = corpus::top_frequent_utterances(all_utts, pcfg.n_frequent);
    write_json_file(frequent_out, frequent);
  } else {
    if (!frequent_path) throw ConfigError("--frequent FILE (written by the train split) is required for " + split);
    frequent = read_json_file(*frequent_path).get<std::set<std::string>>();
    manifest.input(*frequent_path);
  }

  corpus::DirectoryFrameStore store(feat_dir);
  std::vector<corpus::DialogueTriple> triples;
  for (const auto& [video, log] : parsed) {
    auto t = corpus::build_triples(video, log.utterances, store, pcfg, frequent);
    triples.insert(triples.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  {
    std::ofstream os(out);
    if (!os) throw DataError("cannot write " + out.string());
    corpus::write_triples(os, triples);
  }
  const fs::path stats_out = out.string() + ".stats.json";
  write_json_file(stats_out, corpus::corpus_stats(triples));
  manifest.output(out);
  manifest.output(stats_out);
  if (split == "train") manifest.output(frequent_out);
  manifest.write(out.string() + ".manifest.json");
  std::cout << triples.size() << " triples from " << parsed.size() << " videos -> " << out.string() << '\n';
  return kOk;
}

int cmd_stats(const fs::path& dataset) {
  std::cout << json(corpus::corpus_stats(load_triples(dataset, false))).dump(2) << '\n';
  return kOk;
}

int cmd_train(const fs::path& dataset, const std::string& name, const std::optional<fs::path>& config_path,
              const fs::path& out, const std::optional<fs::path>& val_path, std::uint64_t seed) {
  const json cfg = config_path ? read_json_file(*config_path) : json::object();
  json model_cfg = config_section(cfg, "model");
  auto tcfg = parse_section<models::TrainConfig>(cfg, "train");
  tcfg.seed = seed;
  tcfg.validate();
  cli::RunManifest manifest("train " + name, seed);
  manifest.input(dataset);
  if (config_path) manifest.input(*config_path);

  const bool needs_video = name != "lm" && name != "dual_chat" && name != "seq2seq_chat";
  const auto triples = load_triples(dataset, needs_video);
  const models::Dims dims = dims_for(model_cfg, triples);
  model_cfg["dims"] = dims;
  const auto vocab = encoders::build_vocab(triples, dims.vocab_size);
  const auto data = models::make_dataset(triples, vocab, dims);
  const fs::path trace_out = out.string() + ".loss.json";

  if (name == "lm") {
    const auto lcfg = parse_section<baselines::LmConfig>(cfg, "lm");
    baselines::LanguageModel lm(lcfg, vocab, seed);
    const auto trace = baselines::train_lm(lm, baselines::lm_texts(data));
    baselines::save_lm(out, lm);
    write_json_file(trace_out, {{"epoch_loss", trace}});
    manifest.config({{"lm", lcfg}});
    for (std::size_t e = 0; e < trace.size(); ++e) std::cout << "epoch " << e + 1 << " loss " << trace[e] << '\n';
  } else {
    models::AnyModel model = models::make_model(name, model_cfg, vocab, seed);
    reject_unknown_keys(config_section(cfg, "model"), models::model_header(model, seed)["config"], "model.");
    models::require_multiple_videos(data);
    models::TrainHooks hooks;
    hooks.on_epoch = [&](std::size_t epoch, double loss) {
      models::save_model(out, model, seed);
      std::cout << "epoch " << epoch << " loss " << std::setprecision(6) << loss << std::endl;
    };
    models::Dataset val;
    if (val_path) {
      manifest.input(*val_path);
      val = models::make_dataset(load_triples(*val_path, needs_video), vocab, dims);
      hooks.select = [&](std::size_t) {
        if (auto* g = std::get_if<models::GenerativeModel>(&model)) return eval::evaluate_generation(*g, val).meteor_lite;
        return eval::evaluate_retrieval(models::model_scorer(model), val, seed).r1;
      };
    }
    const auto res = std::visit([&](auto& m) { return models::train(m, data, tcfg, hooks); }, model);
    models::save_model(out, model, seed);
    json trace = {{"epoch_loss", res.epoch_loss}, {"steps", res.steps}};
    if (res.best_epoch) trace["best_epoch"] = *res.best_epoch, trace["best_metric"] = res.best_metric;
    write_json_file(trace_out, trace);
    manifest.config({{"model", models::model_header(model, seed)["config"]}, {"train", tcfg}});
  }
  manifest.output(out);
  manifest.output(trace_out);
  manifest.write(out.string() + ".manifest.json");
  return kOk;
}

struct EvalOptions {
  fs::path dataset;
  std::optional<fs::path> ckpt, train, out;
  std::string scorer = "model";
  std::uint64_t seed = 0;
  std::size_t limit = 0;
  std::optional<fs::path> config;
};

int cmd_evaluate(const EvalOptions& o) {
  cli::RunManifest manifest("evaluate " + o.scorer, o.seed);
  manifest.input(o.dataset);
  std::optional<models::AnyModel> model;
  std::optional<baselines::LanguageModel> lm;
  std::optional<models::Checkpoint> ck;
  if (o.ckpt) {
    manifest.input(*o.ckpt);
    ck = models::load_checkpoint(*o.ckpt);
  }
  const bool want_model = o.scorer == "model";
  const bool want_lm = o.scorer == "cosine" || o.scorer == "nearest_neighbor" || o.scorer == "logistic" ||
                       o.scorer == "naive_bayes";
  if ((want_model || want_lm) && !ck) throw ConfigError("--ckpt is required for scorer " + o.scorer);
  if (want_model) {
    model.emplace(models::model_from_header(ck->header));
    models::apply_checkpoint(*ck, models::model_params(*model));
  }
  if (want_lm) lm.emplace(baselines::lm_from_checkpoint(*ck));

  const bool frames = model && model_uses_video(*model);
  const auto triples = load_triples(o.dataset, frames);
  encoders::Vocab vocab;
  if (model) vocab = models::model_vocab(*model);
  else if (lm) vocab = lm->vocab();
  else vocab = encoders::build_vocab(triples);
  if (model || lm) check_vocab(vocab, triples);
  models::Dims dims = model ? std::visit([](const auto& m) { return m.config().dims; }, *model) : models::Dims{};
  const auto data = models::make_dataset(triples, vocab, dims);

  models::Dataset train_data;
  if (o.train) {
    manifest.input(*o.train);
    train_data = models::make_dataset(load_triples(*o.train, false), vocab, dims);
  }
  auto need_train = [&] {
    if (train_data.empty()) throw ConfigError("--train FILE is required for scorer " + o.scorer);
  };
  const json cfg = o.config ? read_json_file(*o.config) : json::object();
  const json bcfg = config_section(cfg, "baselines");

  models::Scorer scorer;
  if (o.scorer == "model") scorer = models::model_scorer(*model);
  else if (o.scorer == "oracle") scorer = eval::oracle_scorer();
  else if (o.scorer == "constant") scorer = eval::constant_scorer();
  else if (o.scorer == "most_frequent") {
    need_train();
    scorer = baselines::most_frequent_scorer(data, baselines::count_responses(train_data));
  } else if (o.scorer == "cosine") scorer = baselines::cosine_scorer(*lm);
  else if (o.scorer == "nearest_neighbor") {
    need_train();
    scorer = baselines::nearest_neighbor_scorer(*lm, baselines::build_nn_index(*lm, train_data, bcfg.value("k", 5)));
  } else {
    need_train();
    const auto pairs = baselines::make_pair_set(*lm, train_data, bcfg.value("negatives", 3), o.seed);
    if (o.scorer == "logistic") {
      scorer = baselines::classifier_scorer(
          *lm, baselines::train_logistic(pairs, bcfg.value("lr_rate", 0.5), bcfg.value("lr_iterations", 500)));
    } else {
      scorer = baselines::classifier_scorer(*lm, baselines::train_naive_bayes(pairs));
    }
  }

  std::vector<std::size_t> subset;
  for (std::size_t i = 0; o.limit && i < std::min(o.limit, data.size()); ++i) subset.push_back(i);
  const auto res = eval::evaluate_retrieval(scorer, data, o.seed, subset);
  json summary = {{"instances", res.records.size()}, {"r@1", res.r1}, {"r@2", res.r2}, {"r@5", res.r5}};
  if (model) {
    if (auto* g = std::get_if<models::GenerativeModel>(&*model)) {
      const auto gen = eval::evaluate_generation(*g, data, subset);
      summary["rouge_l"] = gen.rouge_l;
      summary["meteor_lite"] = gen.meteor_lite;
    }
  }
  std::cout << summary.dump(2) << '\n';
  if (o.out) {
    std::ofstream os(*o.out);
    if (!os) throw DataError("cannot write " + o.out->string());
    eval::write_records(os, res);
    os.close();
    manifest.config({{"scorer", o.scorer}, {"limit", o.limit}, {"summary", summary}});
    manifest.output(*o.out);
    manifest.write(o.out->string() + ".manifest.json");
  }
  return kOk;
}

struct Loaded {
  models::AnyModel model;
  models::Dataset data;
};

Loaded load_model_and_data(const fs::path& ckpt, const fs::path& dataset) {
  const auto ck = models::load_checkpoint(ckpt);
  if (ck.header.value("kind", "") == "lm") throw ConfigError("checkpoint holds a language model, not a response model");
  Loaded l{models::model_from_header(ck.header), {}};
  models::apply_checkpoint(ck, models::model_params(l.model));
  const auto triples = load_triples(dataset, model_uses_video(l.model));
  check_vocab(models::model_vocab(l.model), triples);
  const auto dims = std::visit([](const auto& m) { return m.config().dims; }, l.model);
  l.data = models::make_dataset(triples, models::model_vocab(l.model), dims);
  return l;
}

int cmd_rank(const fs::path& dataset, const fs::path& ckpt, const std::string& instance, std::uint64_t seed) {
  auto l = load_model_and_data(ckpt, dataset);
  const std::size_t pos = find_instance(l.data, instance);
  const auto list = models::sample_eval_list(l.data, pos, seed);
  const auto rec = eval::score_list(models::model_scorer(l.model), l.data, list);
  const auto order = baselines::rank_by_scores(rec.list.scores);
  std::cout << "instance " << instance << " (seed " << seed << ")\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t k = order[r];
    std::cout << std::setw(2) << r + 1 << (k == list.positive_index ? " * " : "   ") << std::setw(14)
              << std::setprecision(6) << rec.list.scores[k] << "  " << join(l.data[list.candidates[k]].response_tokens)
              << '\n';
  }
  return kOk;
}

int cmd_generate(const fs::path& dataset, const fs::path& ckpt, const std::string& instance,
                 std::optional<std::size_t> max_len) {
  auto l = load_model_and_data(ckpt, dataset);
  auto* g = std::get_if<models::GenerativeModel>(&l.model);
  if (!g) throw ConfigError("generate needs a generative checkpoint");
  const auto& e = l.data[find_instance(l.data, instance)];
  std::cout << join(g->generate(e, max_len).tokens) << '\n';
  return kOk;
}

int cmd_visualize(const fs::path& dataset, const fs::path& ckpt, const std::string& instance, const fs::path& out) {
  auto l = load_model_and_data(ckpt, dataset);
  auto* g = std::get_if<models::GenerativeModel>(&l.model);
  if (!g) throw ConfigError("visualize-attention needs a generative checkpoint");
  const auto& e = l.data[find_instance(l.data, instance)];
  const auto gen = g->generate(e);
  for (const auto& f : cli::export_attention(out, *g, e, gen)) std::cout << f.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video-context chat dialogue toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for every random substream")->capture_default_str();

  std::function<int()> run;

  auto* synth = app.add_subcommand("synth", "Write a synthetic chat-log and feature corpus");
  fs::path synth_out;
  std::size_t videos = 6, periods = 6, frame_dim = 16;
  double fps = 3.0;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--videos", videos)->capture_default_str();
  synth->add_option("--periods", periods, "30-second periods per video")->capture_default_str();
  synth->add_option("--frame-dim", frame_dim)->capture_default_str();
  synth->add_option("--fps", fps)->capture_default_str();
  synth->callback([&] { run = [&] { return cmd_synth(synth_out, videos, periods, frame_dim, fps, seed); }; });

  auto* build = app.add_subcommand("build-dataset", "Build dialogue triples from chat logs and frame features");
  fs::path chat_dir, feat_dir, build_out;
  std::optional<fs::path> build_cfg, frequent;
  std::string split = "train";
  build->add_option("--chat", chat_dir, "Directory of <video>.jsonl chat logs")->required()->check(CLI::ExistingDirectory);
  build->add_option("--features", feat_dir, "Directory of <video>.vfea files")->required()->check(CLI::ExistingDirectory);
  build->add_option("--out", build_out, "Triple JSONL output")->required();
  build->add_option("--config", build_cfg, "JSON config")->check(CLI::ExistingFile);
  build->add_option("--split", split)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
  build->add_option("--frequent", frequent, "Frequent-utterance set from the train split")->check(CLI::ExistingFile);
  build->callback([&] {
    run = [&] { return cmd_build_dataset(chat_dir, feat_dir, build_out, build_cfg, split, frequent, seed); };
  });

  auto* stats = app.add_subcommand("stats", "Print corpus statistics of a triple file");
  fs::path stats_in;
  stats->add_option("--dataset", stats_in)->required()->check(CLI::ExistingFile);
  stats->callback([&] { run = [&] { return cmd_stats(stats_in); }; });

  auto* train = app.add_subcommand("train", "Train a response model or the baseline language model");
  fs::path train_data, train_out;
  std::optional<fs::path> train_cfg, val;
  std::string model_name;
  std::vector<std::string> names = models::model_names();
  names.push_back("lm");
  train->add_option("--dataset", train_data)->required()->check(CLI::ExistingFile);
  train->add_option("--model", model_name)->required()->check(CLI::IsMember(names));
  train->add_option("--config", train_cfg)->check(CLI::ExistingFile);
  train->add_option("--val", val, "Validation triples for model selection")->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Checkpoint path")->required();
  train->callback([&] { run = [&] { return cmd_train(train_data, model_name, train_cfg, train_out, val, seed); }; });

  auto* evaluate = app.add_subcommand("evaluate", "Recall@k over seeded 10-way lists");
  EvalOptions eo;
  evaluate->add_option("--dataset", eo.dataset)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--ckpt", eo.ckpt, "Model or language-model checkpoint")->check(CLI::ExistingFile);
  evaluate->add_option("--scorer", eo.scorer)
      ->check(CLI::IsMember({"model", "oracle", "constant", "most_frequent", "cosine", "nearest_neighbor", "logistic",
                             "naive_bayes"}))
      ->capture_default_str();
  evaluate->add_option("--train", eo.train, "Training triples (baselines)")->check(CLI::ExistingFile);
  evaluate->add_option("--config", eo.config)->check(CLI::ExistingFile);
  evaluate->add_option("--out", eo.out, "Per-instance JSONL");
  evaluate->add_option("--limit", eo.limit, "Evaluate only the first N instances");
  evaluate->callback([&] {
    eo.seed = seed;
    run = [&] { return cmd_evaluate(eo); };
  });

  auto* rank = app.add_subcommand("rank", "Score the 10-way list of one instance");
  fs::path rank_data, rank_ckpt;
  std::string rank_id;
  rank->add_option("--dataset", rank_data)->required()->check(CLI::ExistingFile);
  rank->add_option("--ckpt", rank_ckpt)->required()->check(CLI::ExistingFile);
  rank->add_option("--instance", rank_id, "Instance id <video>#<window>")->required();
  rank->callback([&] { run = [&] { return cmd_rank(rank_data, rank_ckpt, rank_id, seed); }; });

  auto* gen = app.add_subcommand("generate", "Greedy response for one instance");
  fs::path gen_data, gen_ckpt;
  std::string gen_id;
  std::optional<std::size_t> max_len;
  gen->add_option("--dataset", gen_data)->required()->check(CLI::ExistingFile);
  gen->add_option("--ckpt", gen_ckpt)->required()->check(CLI::ExistingFile);
  gen->add_option("--instance", gen_id)->required();
  gen->add_option("--max-len", max_len, "Defaults to the model's max_decode_len");
  gen->callback([&] { run = [&] { return cmd_generate(gen_data, gen_ckpt, gen_id, max_len); }; });

  auto* vis = app.add_subcommand("visualize-attention", "Export decoder attention maps (TSV + SVG)");
  fs::path vis_data, vis_ckpt, vis_out;
  std::string vis_id;
  vis->add_option("--dataset", vis_data)->required()->check(CLI::ExistingFile);
  vis->add_option("--ckpt", vis_ckpt)->required()->check(CLI::ExistingFile);
  vis->add_option("--instance", vis_id)->required();
  vis->add_option("--out", vis_out, "Output directory")->required();
  vis->callback([&] { run = [&] { return cmd_visualize(vis_data, vis_ckpt, vis_id, vis_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return run();
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
