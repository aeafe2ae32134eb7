#include "wordvision/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wordvision/common.hpp"
#include "wordvision/simd.hpp"

namespace wv {

using nlohmann::json;
namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (ways < 2) throw ConfigError("config: ways must be >= 2");
  if (shots < 1) throw ConfigError("config: shots must be >= 1");
  if (n < 1) throw ConfigError("config: n must be >= 1");
  if (n_pos < 0) throw ConfigError("config: n_pos must be >= 0");
  if (n_neg < 1) throw ConfigError("config: n_neg must be >= 1");
  if (lr < 0.0) throw ConfigError("config: lr must be >= 0");
  if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
  if (patience < 1) throw ConfigError("config: patience must be >= 1");
  if (d_emb < 1) throw ConfigError("config: d_emb must be >= 1");
  if (episodes < 1) throw ConfigError("config: episodes must be >= 1");
  if (queries_per_class < 1) throw ConfigError("config: queries_per_class must be >= 1");
  if (val_fraction < 0.0 || val_fraction >= 1.0) {
    throw ConfigError("config: val_fraction must be in [0, 1)");
  }
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
  if (!use_synthetic && data_dir.empty()) {
    throw ConfigError("config: either data_dir or synthetic.* settings are required");
  }
  if (use_synthetic && !data_dir.empty()) {
    throw ConfigError("config: data_dir and synthetic.* settings are mutually exclusive");
  }
  if (use_synthetic) effective_synthetic().validate();
}

SyntheticSpec RunConfig::effective_synthetic() const {
  SyntheticSpec s = synthetic;
  s.classes = ways;
  s.support_shots = shots;
  s.seed = mix64(seed ^ 0x64617461ULL);
  return s;
}

namespace {

struct ConfigField {
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value);

template <>
int parse_number<int>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  }
}

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  }
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: bad seed for " + key + ": '" + value + "'");
  }
}

}  // namespace

RunConfig parse_run_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());

  std::vector<ConfigField> fields;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config " + path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    fields.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }

  RunConfig c;
  bool synthetic_touched = false;
  for (const ConfigField& f : fields) {
    const std::string& k = f.key;
    const std::string& v = f.value;
    if (k == "data_dir") c.data_dir = v;
    else if (k == "ways") c.ways = parse_number<int>(k, v);
    else if (k == "shots") c.shots = parse_number<int>(k, v);
    else if (k == "n") c.n = parse_number<int>(k, v);
    else if (k == "match") c.match = parse_number<double>(k, v);
    else if (k == "mismatch") c.mismatch = parse_number<double>(k, v);
    else if (k == "gap") c.gap = parse_number<double>(k, v);
    else if (k == "val_fraction") c.val_fraction = parse_number<double>(k, v);
    else if (k == "n_pos") c.n_pos = parse_number<int>(k, v);
    else if (k == "n_neg") c.n_neg = parse_number<int>(k, v);
    else if (k == "lr") c.lr = parse_number<double>(k, v);
    else if (k == "epochs") c.epochs = parse_number<int>(k, v);
    else if (k == "patience") c.patience = parse_number<int>(k, v);
    else if (k == "d_emb") c.d_emb = parse_number<int>(k, v);
    else if (k == "episodes") c.episodes = parse_number<int>(k, v);
    else if (k == "queries_per_class") c.queries_per_class = parse_number<int>(k, v);
    else if (k == "seed") c.seed = parse_number<std::uint64_t>(k, v);
    else if (k == "workers") c.workers = parse_number<int>(k, v);
    else if (k == "synthetic.unit_vocab") { c.synthetic.unit_vocab = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.word_len_min") { c.synthetic.word_len_min = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.word_len_max") { c.synthetic.word_len_max = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.utt_len_min") { c.synthetic.utt_len_min = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.utt_len_max") { c.synthetic.utt_len_max = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.substitution_noise") { c.synthetic.substitution_noise = parse_number<double>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.cluster_separation") { c.synthetic.cluster_separation = parse_number<double>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.d_frame") { c.synthetic.d_frame = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.d_aud") { c.synthetic.d_aud = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.d_img") { c.synthetic.d_img = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.d_pix") { c.synthetic.d_pix = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.grid_h") { c.synthetic.grid_h = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.grid_w") { c.synthetic.grid_w = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.frame_noise") { c.synthetic.frame_noise = parse_number<double>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.word_noise") { c.synthetic.word_noise = parse_number<double>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.image_noise") { c.synthetic.image_noise = parse_number<double>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.style_dims") { c.synthetic.style_dims = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.style_noise") { c.synthetic.style_noise = parse_number<double>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.utterances_per_class") { c.synthetic.utterances_per_class = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.pool_images_per_class") { c.synthetic.pool_images_per_class = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.background_images") { c.synthetic.background_images = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.test_queries_per_class") { c.synthetic.test_queries_per_class = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.test_images_per_class") { c.synthetic.test_images_per_class = parse_number<int>(k, v); synthetic_touched = true; }
    else if (k == "synthetic.imposter_images") { c.synthetic.imposter_images = parse_number<int>(k, v); synthetic_touched = true; }
    else throw ConfigError("config: unknown key '" + k + "'");
  }
  c.use_synthetic = synthetic_touched;
  c.validate();
  return c;
}

std::string canonical_config_text(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  auto put = [&kv](const std::string& k, auto v) {
    std::ostringstream os;
    os << v;
    kv[k] = os.str();
  };
  put("data_dir", c.data_dir);
  put("ways", c.ways);
  put("shots", c.shots);
  put("n", c.n);
  put("match", c.match);
  put("mismatch", c.mismatch);
  put("gap", c.gap);
  put("val_fraction", c.val_fraction);
  put("n_pos", c.n_pos);
  put("n_neg", c.n_neg);
  put("lr", c.lr);
  put("epochs", c.epochs);
  put("patience", c.patience);
  put("d_emb", c.d_emb);
  put("episodes", c.episodes);
  put("queries_per_class", c.queries_per_class);
  put("seed", c.seed);
  put("workers", c.workers);
  if (c.use_synthetic) {
    const SyntheticSpec& s = c.synthetic;
    put("synthetic.unit_vocab", s.unit_vocab);
    put("synthetic.word_len_min", s.word_len_min);
    put("synthetic.word_len_max", s.word_len_max);
    put("synthetic.utt_len_min", s.utt_len_min);
    put("synthetic.utt_len_max", s.utt_len_max);
    put("synthetic.substitution_noise", s.substitution_noise);
    put("synthetic.cluster_separation", s.cluster_separation);
    put("synthetic.d_frame", s.d_frame);
    put("synthetic.d_aud", s.d_aud);
    put("synthetic.d_img", s.d_img);
    put("synthetic.d_pix", s.d_pix);
    put("synthetic.grid_h", s.grid_h);
    put("synthetic.grid_w", s.grid_w);
    put("synthetic.frame_noise", s.frame_noise);
    put("synthetic.word_noise", s.word_noise);
    put("synthetic.image_noise", s.image_noise);
    put("synthetic.style_dims", s.style_dims);
    put("synthetic.style_noise", s.style_noise);
    put("synthetic.utterances_per_class", s.utterances_per_class);
    put("synthetic.pool_images_per_class", s.pool_images_per_class);
    put("synthetic.background_images", s.background_images);
    put("synthetic.test_queries_per_class", s.test_queries_per_class);
    put("synthetic.test_images_per_class", s.test_images_per_class);
    put("synthetic.imposter_images", s.imposter_images);
  }
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  // FNV-1a over the canonical text.
  const std::string text = canonical_config_text(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- stages ------------------------------------------------------------------

void stage_segment(const fs::path& units_file, const fs::path& out_file) {
  const auto sequences = read_units_jsonl(units_file);
  std::vector<SegmentedUtterance> segmented;
  segmented.reserve(sequences.size());
  for (const UnitSequence& seq : sequences) segmented.push_back(segment_units(seq));
  write_segments_jsonl(out_file, segmented);
}

namespace {

QueryBank load_query_bank(const SupportSet& support) {
  if (support.units_file.empty()) {
    throw ConfigError("support manifest has no units_file entry");
  }
  std::map<std::string, SegmentedUtterance> by_id;
  for (const UnitSequence& seq : read_units_jsonl(support.units_file)) {
    by_id[seq.utterance_id] = segment_units(seq);
  }
  QueryBank bank;
  for (const std::string& label : support.class_labels()) {
    bank.classes.push_back({label, {}});
  }
  for (const SupportItem& item : support.items) {
    auto it = by_id.find(item.word_utterance);
    if (it == by_id.end()) {
      throw Error("support word " + item.word_utterance + " missing from units file");
    }
    SegmentedUtterance query = it->second.slice(item.span_begin, item.span_end);
    for (auto& [label, queries] : bank.classes) {
      if (label == item.class_label) {
        queries.push_back(std::move(query));
        break;
      }
    }
  }
  bank.validate();
  return bank;
}

}  // namespace

std::vector<MinedWord> stage_search(const fs::path& queries_manifest,
                                    const fs::path& corpus_file,
                                    const ScoringParams& scoring, int n,
                                    const fs::path& out_file) {
  const SupportSet support = read_support_manifest(queries_manifest);
  const QueryBank bank = load_query_bank(support);
  const auto corpus = load_corpus(corpus_file);
  const auto rankings = search_corpus(bank, corpus, scoring);
  std::vector<MinedWord> mined;
  for (const ClassRanking& ranking : rankings) {
    for (MinedWord& w : take_top_n(ranking, n)) mined.push_back(std::move(w));
  }
  write_mined_words(out_file, mined);
  return mined;
}

std::vector<ImageRanking> stage_mine_images(const fs::path& queries_manifest,
                                            const fs::path& pool_emb, int n,
                                            const fs::path& out_file) {
  const SupportSet support = read_support_manifest(queries_manifest);
  if (support.images_file.empty()) {
    throw ConfigError("support manifest has no images_file entry");
  }
  std::map<std::string, ImageEmbedding> by_id;
  for (ImageEmbedding& e : read_embedding_store(support.images_file)) {
    by_id[e.image_id] = std::move(e);
  }
  std::vector<std::pair<std::string, std::vector<ImageEmbedding>>> support_by_class;
  for (const std::string& label : support.class_labels()) {
    support_by_class.push_back({label, {}});
  }
  for (const SupportItem& item : support.items) {
    auto it = by_id.find(item.image_id);
    if (it == by_id.end()) {
      throw Error("support image " + item.image_id + " missing from images file");
    }
    for (auto& [label, embeddings] : support_by_class) {
      if (label == item.class_label) {
        embeddings.push_back(it->second);
        break;
      }
    }
  }
  const auto pool = read_embedding_store(pool_emb);
  const auto rankings = mine_images(support_by_class, pool, n);
  write_image_rankings(out_file, rankings);
  return rankings;
}

MinedPairSet stage_build_pairs(const fs::path& words_file, const fs::path& images_file,
                               const fs::path& background_file, int n, double val_fraction,
                               std::uint64_t seed, const fs::path& out_file) {
  const auto words = read_mined_words(words_file);
  const auto images = read_image_rankings(images_file);
  auto background = read_id_list(background_file);
  const MinedPairSet pairs =
      build_mined_pairs(words, images, n, val_fraction, seed, std::move(background));
  write_pair_set(out_file, pairs);
  return pairs;
}

namespace {

FeatureStore load_feature_store_for_pairs(const MinedPairSet& pairs,
                                          const fs::path& word_feats,
                                          const fs::path& grids_dir) {
  FeatureStore store;
  store.words = read_word_features(word_feats);
  std::set<std::string> image_ids(pairs.background_image_ids.begin(),
                                  pairs.background_image_ids.end());
  for (const auto& [label, class_pairs] : pairs.pairs_by_class) {
    for (const MinedPair& p : class_pairs) image_ids.insert(p.image_id);
  }
  for (const std::string& id : image_ids) {
    store.grids[id] = load_grid(grids_dir, id);
  }
  return store;
}

int infer_word_dim(const FeatureStore& store) {
  if (store.words.empty()) throw EmptyInput("word feature store is empty");
  return static_cast<int>(store.words.begin()->second.size());
}

int infer_grid_dim(const FeatureStore& store) {
  if (store.grids.empty()) throw EmptyInput("grid store is empty");
  return store.grids.begin()->second.dim;
}

}  // namespace

TrainResult stage_train(const fs::path& pairs_file, const fs::path& word_feats,
                        const fs::path& grids_dir, const TrainConfig& config, int d_emb,
                        const fs::path& checkpoint_out, const fs::path& history_out) {
  const MinedPairSet pairs = read_pair_set(pairs_file);
  const FeatureStore store = load_feature_store_for_pairs(pairs, word_feats, grids_dir);
  const ModelParams init = ModelParams::random_init(
      infer_word_dim(store), infer_grid_dim(store), d_emb, mix64(config.seed ^ 0x696e6974ULL));
  TrainResult result = train(init, pairs, store, config);
  save_checkpoint(checkpoint_out, result.params);
  write_training_history(history_out, result);
  return result;
}

ClassificationReport stage_eval_fewshot(const fs::path& checkpoint,
                                        const fs::path& test_manifest, int episodes,
                                        int ways, std::uint64_t seed,
                                        const fs::path& report_out) {
  const ModelParams params = load_checkpoint(checkpoint);
  const TestManifest manifest = read_test_manifest(test_manifest);

  TestSet test_set;
  FeatureStore store;
  store.words = read_word_features(manifest.word_feats);
  for (const auto& [id, label] : manifest.queries) {
    test_set.queries_by_class[label].push_back(id);
  }
  for (const auto& [id, label] : manifest.images) {
    test_set.images_by_class[label].push_back(id);
    store.grids[id] = load_grid(manifest.grids_dir, id);
  }

  const auto eps = sample_episodes(test_set, ways, episodes, mix64(seed ^ 0x65706973ULL));
  const ClassificationReport report = evaluate_classification(params, eps, store);

  json per_class = json::object();
  for (const auto& [label, acc] : report.per_class_accuracy) per_class[label] = acc;
  json j{{"episodes", report.episodes},
         {"ways", report.ways},
         {"accuracy", report.accuracy},
         {"stderr_episodes", report.stderr_episodes},
         {"per_class_accuracy", per_class},
         {"config", {{"checkpoint", checkpoint.filename().string()}, {"seed", seed}}}};
  std::ofstream os(report_out);
  if (!os) throw Error("cannot write " + report_out.string());
  os << j.dump(2) << '\n';
  return report;
}

RetrievalReport stage_eval_retrieval(const fs::path& checkpoint,
                                     const fs::path& pool_manifest, int queries_per_class,
                                     std::uint64_t seed, const fs::path& report_out,
                                     bool average_after_projection) {
  const ModelParams params = load_checkpoint(checkpoint);
  const PoolManifest manifest = read_pool_manifest(pool_manifest);

  FeatureStore store;
  store.words = read_word_features(manifest.word_feats);

  RetrievalPool pool;
  pool.images = manifest.images;
  pool.queries_are_embeddings = average_after_projection;
  for (const auto& [id, _] : pool.images) {
    store.grids[id] = load_grid(manifest.grids_dir, id);
  }
  Rng rng(mix64(seed ^ 0x72657472ULL));
  for (const auto& [label, candidates] : manifest.query_candidates) {
    if (candidates.empty()) {
      throw InsufficientPool("retrieval: class " + label + " has no query candidates");
    }
    const std::size_t take =
        std::min(candidates.size(), static_cast<std::size_t>(queries_per_class));
    std::vector<std::vector<double>> selected;
    Rng class_rng = rng.fork(mix64(std::hash<std::string>{}(label)));
    for (std::size_t idx : class_rng.sample_without_replacement(candidates.size(), take)) {
      const auto& word = store.words.at(candidates[idx]);
      selected.push_back(average_after_projection ? project_word_embedding(params, word)
                                                  : word);
    }
    std::vector<double> query = average_queries(selected);
    if (average_after_projection) {
      const double norm = std::sqrt(simd::norm_sq(query.data(), query.size()));
      if (norm < 1e-300) {
        throw ZeroVector("retrieval: averaged query embedding for " + label + " is zero");
      }
      simd::scale(query.data(), 1.0 / norm, query.size());
    }
    pool.queries[label] = std::move(query);
  }

  const RetrievalReport report = retrieve(params, pool, store);

  json per_class = json::object();
  for (const RankedList& r : report.per_class) {
    json top = json::array();
    const std::size_t preview = std::min<std::size_t>(r.image_ids.size(), 10);
    for (std::size_t i = 0; i < preview; ++i) top.push_back(r.image_ids[i]);
    per_class[r.class_label] = {{"p_at_n", r.p_at_n}, {"n", r.n}, {"top", top}};
  }
  json j{{"macro_p_at_n", report.macro_p_at_n},
         {"per_class", per_class},
         {"skipped_classes", report.skipped_classes},
         {"config",
          {{"checkpoint", checkpoint.filename().string()},
           {"queries_per_class", queries_per_class},
           {"average_after_projection", average_after_projection},
           {"seed", seed}}}};
  std::ofstream os(report_out);
  if (!os) throw Error("cannot write " + report_out.string());
  os << j.dump(2) << '\n';
  return report;
}

namespace {

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

// Aborts carry the stage name; artifacts written so far stay on disk for
// inspection.
template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error("stage " + name + ": " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const fs::path& runs_root) {
  config.validate();
  if (config.workers > 0) set_worker_override(config.workers);

  PipelineResult result;
  result.run_dir = runs_root / hash_hex(config_hash(config));
  fs::create_directories(result.run_dir);
  {
    std::ofstream os(result.run_dir / "config.txt");
    if (!os) throw Error("cannot write config echo");
    os << canonical_config_text(config);
  }

  fs::path data_dir;
  if (config.use_synthetic) {
    data_dir = result.run_dir / "data";
    run_stage("generate",
              [&] { return generate_synthetic(config.effective_synthetic(), data_dir); });
  } else {
    data_dir = config.data_dir;
    const SupportSet support = read_support_manifest(data_dir / "support.manifest");
    if (support.ways != config.ways || support.shots != config.shots) {
      throw ConfigError("config ways/shots do not match the support manifest");
    }
  }

  const fs::path segments = result.run_dir / "segments.jsonl";
  run_stage("segment", [&] {
    stage_segment(data_dir / "corpus_units.jsonl", segments);
    return 0;
  });

  const fs::path mined_words = result.run_dir / "mined_words.json";
  run_stage("search", [&] {
    return stage_search(data_dir / "support.manifest", segments, config.scoring(), config.n,
                        mined_words);
  });

  const fs::path mined_images = result.run_dir / "mined_images.json";
  run_stage("mine-images", [&] {
    return stage_mine_images(data_dir / "support.manifest", data_dir / "images.emb",
                             config.n, mined_images);
  });

  const fs::path pairs_file = result.run_dir / "pairs.json";
  run_stage("build-pairs", [&] {
    return stage_build_pairs(mined_words, mined_images, data_dir / "background.ids",
                             config.n, config.val_fraction,
                             mix64(config.seed ^ 0x7061697273ULL), pairs_file);
  });

  const fs::path checkpoint = result.run_dir / "checkpoint.bin";
  run_stage("train", [&] {
    TrainConfig tc;
    tc.lr = config.lr;
    tc.epochs = config.epochs;
    tc.n_pos = config.n_pos;
    tc.n_neg = config.n_neg;
    tc.patience = config.patience;
    tc.seed = mix64(config.seed ^ 0x747261696eULL);
    return stage_train(pairs_file, data_dir / "word_feats.emb", data_dir / "grids", tc,
                       config.d_emb, checkpoint, result.run_dir / "history.json");
  });

  const ClassificationReport cls = run_stage("eval-fewshot", [&] {
    return stage_eval_fewshot(checkpoint, data_dir / "test.manifest", config.episodes,
                              config.ways, mix64(config.seed ^ 0x6576616cULL),
                              result.run_dir / "fewshot_report.json");
  });
  result.classification_accuracy = cls.accuracy;

  const RetrievalReport ret = run_stage("eval-retrieval", [&] {
    return stage_eval_retrieval(checkpoint, data_dir / "pool.manifest",
                                config.queries_per_class,
                                mix64(config.seed ^ 0x6576616cULL),
                                result.run_dir / "retrieval_report.json");
  });
  result.retrieval_macro_p_at_n = ret.macro_p_at_n;

  return result;
}

}  // namespace wv
