// Acceptance suite: one self-contained check per release criterion, each
// printed as a PASS/FAIL line. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wordvision/common.hpp"
#include "wordvision/pipeline.hpp"

using namespace wv;
namespace fs = std::filesystem;

namespace {

fs::path g_work;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SegmentedUtterance from_ids(const std::string& id, const std::vector<int>& ids) {
  SegmentedUtterance s;
  s.utterance_id = id;
  int frame = 0;
  for (int unit : ids) {
    s.segments.push_back({unit, frame, frame + 1});
    ++frame;
  }
  return s;
}

// --- 1. alignment oracle -----------------------------------------------------

Outcome check_alignment_oracle() {
  Rng rng(0xA11C);
  const ScoringParams scoring;  // match 1, mismatch -1, gap -1
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> q(1 + rng.below(6)), t(1 + rng.below(12));
    for (int& x : q) x = static_cast<int>(rng.below(4));
    for (int& x : t) x = static_cast<int>(rng.below(4));
    const AlignmentResult r = nw_align(from_ids("q", q), from_ids("t", t), scoring);
    const double expect =
        oracle::align_free_flanks(q, t, scoring.match, scoring.mismatch, scoring.gap);
    if (r.raw_score != expect) ++mismatches;
  }
  std::ostringstream os;
  os << mismatches << "/1000 mismatches vs brute-force enumerator (exact equality)";
  return {mismatches == 0, os.str()};
}

// --- 2. dtw oracle -------------------------------------------------------------

Outcome check_dtw_oracle() {
  Rng rng(0xD73);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> a(1 + rng.below(7)), b(1 + rng.below(7));
    for (auto& row : a) {
      row.resize(3);
      for (double& v : row) v = rng.normal();
    }
    for (auto& row : b) {
      row.resize(3);
      for (double& v : row) v = rng.normal();
    }
    FrameFeatureSequence fa, fb;
    fa.dim = fb.dim = 3;
    for (const auto& row : a) fa.data.insert(fa.data.end(), row.begin(), row.end());
    for (const auto& row : b) fb.data.insert(fb.data.end(), row.begin(), row.end());
    worst = std::max(worst, std::abs(dtw_distance(fa, fb) - oracle::dtw(a, b)));
  }
  std::ostringstream os;
  os << "max |dtw - exhaustive path minimum| = " << worst << " (tolerance 1e-9)";
  return {worst < 1e-9, os.str()};
}

// --- 3. gradient check ---------------------------------------------------------

Outcome check_gradient() {
  Rng rng(0x67AD);
  const double eps = 1e-5;
  double max_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d_aud = 3 + static_cast<int>(rng.below(3));
    const int d_pix = 3 + static_cast<int>(rng.below(3));
    const int d_emb = 2 + static_cast<int>(rng.below(7));
    const int h = 1 + static_cast<int>(rng.below(3));
    const int w = 1 + static_cast<int>(rng.below(3));

    ModelParams p = ModelParams::random_init(d_aud, d_pix, d_emb, rng.next_u64());
    std::vector<double> anchor_word(d_aud);
    for (double& v : anchor_word) v = rng.normal();
    auto make_grid = [&](const std::string& id) {
      EmbeddingGrid g;
      g.image_id = id;
      g.height = h;
      g.width = w;
      g.dim = d_pix;
      g.data.resize(static_cast<std::size_t>(h * w * d_pix));
      for (double& v : g.data) v = rng.normal();
      return g;
    };
    const EmbeddingGrid anchor_grid = make_grid("a");
    std::vector<std::vector<double>> pos_words(2), neg_words(3);
    std::vector<EmbeddingGrid> pos_grids, neg_grids, bg_grids;
    for (auto& wv_ : pos_words) {
      wv_.resize(static_cast<std::size_t>(d_aud));
      for (double& v : wv_) v = rng.normal();
    }
    for (auto& wv_ : neg_words) {
      wv_.resize(static_cast<std::size_t>(d_aud));
      for (double& v : wv_) v = rng.normal();
    }
    for (int i = 0; i < 2; ++i) pos_grids.push_back(make_grid("p" + std::to_string(i)));
    for (int i = 0; i < 3; ++i) {
      neg_grids.push_back(make_grid("n" + std::to_string(i)));
      bg_grids.push_back(make_grid("b" + std::to_string(i)));
    }
    FeatureBundle bundle;
    bundle.anchor_word = &anchor_word;
    bundle.anchor_grid = &anchor_grid;
    for (const auto& x : pos_words) bundle.positive_words.push_back(&x);
    for (const auto& x : pos_grids) bundle.positive_grids.push_back(&x);
    for (const auto& x : neg_words) bundle.negative_words.push_back(&x);
    for (const auto& x : neg_grids) bundle.negative_grids.push_back(&x);
    for (const auto& x : bg_grids) bundle.background_grids.push_back(&x);

    ModelParams grad;
    loss_gradient(p, bundle, grad);
    for (std::size_t i = 0; i < p.parameter_count(); ++i) {
      const double orig = p.flat(i);
      p.flat(i) = orig + eps;
      const double plus = loss(p, bundle);
      p.flat(i) = orig - eps;
      const double minus = loss(p, bundle);
      p.flat(i) = orig;
      const double fd = (plus - minus) / (2.0 * eps);
      const double rel = std::abs(fd - grad.flat(i)) /
                         std::max({std::abs(fd), std::abs(grad.flat(i)), 1e-6});
      max_rel = std::max(max_rel, rel);
    }
  }
  std::ostringstream os;
  os << "max relative error vs central differences = " << max_rel << " (tolerance 1e-4)";
  return {max_rel < 1e-4, os.str()};
}

// --- 4. closed-form loss -------------------------------------------------------

Outcome check_closed_form_loss() {
  ModelParams p = ModelParams::zeros(2, 2, 2);
  p.w_audio.at(0, 0) = p.w_audio.at(1, 1) = 1.0;
  p.w_vision.at(0, 0) = p.w_vision.at(1, 1) = 1.0;

  const std::vector<double> word{1.0, 0.0};
  EmbeddingGrid grid;
  grid.image_id = "g";
  grid.height = grid.width = 1;
  grid.dim = 2;
  grid.data = {0.0, 1.0};  // orthogonal to every projected word

  FeatureBundle bundle;
  bundle.anchor_word = &word;
  bundle.anchor_grid = &grid;
  for (int i = 0; i < 5; ++i) {
    bundle.positive_words.push_back(&word);
    bundle.positive_grids.push_back(&grid);
  }
  for (int i = 0; i < 11; ++i) {
    bundle.negative_words.push_back(&word);
    bundle.negative_grids.push_back(&grid);
    bundle.background_grids.push_back(&grid);
  }
  const double value = loss(p, bundle);
  std::ostringstream os;
  os << "all-orthogonal loss = " << value << " (expected 42500, tolerance 1e-6)";
  return {std::abs(value - 42500.0) < 1e-6, os.str()};
}

// --- 5. noiseless mining -------------------------------------------------------

SyntheticSpec mining_spec(std::uint64_t seed, double substitution_noise,
                          double frame_noise) {
  SyntheticSpec spec;
  spec.classes = 5;
  spec.unit_vocab = 50;
  spec.substitution_noise = substitution_noise;
  spec.frame_noise = frame_noise;
  spec.utterances_per_class = 100;
  spec.pool_images_per_class = 100;
  spec.background_images = 50;
  spec.support_shots = 5;
  spec.test_queries_per_class = 5;
  spec.test_images_per_class = 5;
  spec.imposter_images = 10;
  spec.seed = seed;
  return spec;
}

Outcome check_noiseless_mining() {
  const fs::path dir = g_work / "noiseless";
  generate_synthetic(mining_spec(71, 0.0, 0.0), dir);

  stage_segment(dir / "corpus_units.jsonl", dir / "segments.jsonl");
  const auto mined = stage_search(dir / "support.manifest", dir / "segments.jsonl", {},
                                  100, dir / "mined_words.json");
  const auto gold_audio = read_gold_labels(dir / "gold_audio.json");
  const F1Report f1 = evaluate_f1(mined, gold_audio);

  const auto rankings = stage_mine_images(dir / "support.manifest", dir / "images.emb",
                                          100, dir / "mined_images.json");
  const auto gold_images = read_gold_labels(dir / "gold_images.json");
  std::size_t pure = 0, total = 0;
  for (const ImageRanking& r : rankings) {
    for (const ImageRankingEntry& e : r.entries) {
      ++total;
      if (gold_images.at(e.image_id).count(r.class_label) > 0) ++pure;
    }
  }
  const double purity = static_cast<double>(pure) / static_cast<double>(total);
  std::ostringstream os;
  os << "QbE F1 = " << f1.micro.f1() << ", image purity = " << purity
     << " (both must be 1.0)";
  return {f1.micro.f1() == 1.0 && purity == 1.0, os.str()};
}

// --- 6. unit search beats frame DTW under noise ---------------------------------

Outcome check_directional_claim() {
  int wins = 0;
  std::ostringstream os;
  os << "unit-NW vs frame-DTW F1 per seed:";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const fs::path dir = g_work / ("noisy_" + std::to_string(seed));
    generate_synthetic(mining_spec(seed, 0.10, 0.25), dir);
    const auto gold = read_gold_labels(dir / "gold_audio.json");
    const SupportSet support = read_support_manifest(dir / "support.manifest");

    stage_segment(dir / "corpus_units.jsonl", dir / "segments.jsonl");
    const auto nw_mined = stage_search(dir / "support.manifest", dir / "segments.jsonl", {},
                                       100, dir / "mined_words.json");
    const double nw_f1 = evaluate_f1(nw_mined, gold).micro.f1();

    // Frame-level DTW baseline over the same utterances and queries.
    std::vector<FrameFeatureSequence> corpus;
    for (const auto& [utt, labels] : gold) {
      corpus.push_back(load_frames(dir / "frames", utt));
    }
    std::vector<std::pair<std::string, std::vector<FrameFeatureSequence>>> queries;
    for (const std::string& label : support.class_labels()) queries.push_back({label, {}});
    for (const SupportItem& item : support.items) {
      for (auto& [label, frames] : queries) {
        if (label == item.class_label) {
          frames.push_back(load_frames(dir / "frames", item.word_utterance));
          break;
        }
      }
    }
    const auto dtw_rankings = dtw_search_corpus(queries, corpus);
    std::vector<MinedWord> dtw_mined;
    for (const ClassRanking& r : dtw_rankings) {
      for (MinedWord& w : take_top_n(r, 100)) dtw_mined.push_back(std::move(w));
    }
    const double dtw_f1 = evaluate_f1(dtw_mined, gold).micro.f1();

    if (nw_f1 > dtw_f1) ++wins;
    os << " [" << nw_f1 << " vs " << dtw_f1 << "]";
  }
  os << " -> " << wins << "/5 wins (need >= 4)";
  return {wins >= 4, os.str()};
}

// --- 7 & 8. end-to-end learning and the no-mining ablation ----------------------

struct EndToEnd {
  bool ran = false;
  double mined_accuracy = 0.0;
  double mined_p_at_n = 0.0;
  double support_accuracy = 0.0;
  std::string error;
};

EndToEnd g_end_to_end;

SyntheticSpec separable_spec() {
  SyntheticSpec spec;
  spec.classes = 5;
  spec.unit_vocab = 50;
  spec.substitution_noise = 0.0;
  spec.word_noise = 0.25;
  spec.image_noise = 0.25;
  spec.style_dims = 6;
  spec.style_noise = 0.5;
  spec.utterances_per_class = 60;
  spec.pool_images_per_class = 60;
  spec.background_images = 60;
  spec.support_shots = 5;
  spec.test_queries_per_class = 30;
  spec.test_images_per_class = 30;
  spec.imposter_images = 150;  // pool is 150 class images + 150 imposters
  spec.seed = 2027;
  return spec;
}

void run_end_to_end() {
  g_end_to_end.ran = true;
  const fs::path dir = g_work / "end_to_end";
  generate_synthetic(separable_spec(), dir);

  TrainConfig tc;
  tc.lr = 1e-3;
  tc.epochs = 100;
  tc.n_pos = 5;
  tc.n_neg = 11;
  tc.patience = 10;
  tc.seed = 11;

  stage_segment(dir / "corpus_units.jsonl", dir / "segments.jsonl");
  stage_search(dir / "support.manifest", dir / "segments.jsonl", {}, 50,
               dir / "mined_words.json");
  stage_mine_images(dir / "support.manifest", dir / "images.emb", 50,
                    dir / "mined_images.json");
  stage_build_pairs(dir / "mined_words.json", dir / "mined_images.json",
                    dir / "background.ids", 50, 0.15, 21, dir / "pairs.json");
  stage_train(dir / "pairs.json", dir / "word_feats.emb", dir / "grids", tc, 16,
              dir / "checkpoint.bin", dir / "history.json");

  const auto cls = stage_eval_fewshot(dir / "checkpoint.bin", dir / "test.manifest", 1000,
                                      5, 33, dir / "fewshot_report.json");
  g_end_to_end.mined_accuracy = cls.accuracy;
  const auto ret = stage_eval_retrieval(dir / "checkpoint.bin", dir / "pool.manifest", 20,
                                        33, dir / "retrieval_report.json");
  g_end_to_end.mined_p_at_n = ret.macro_p_at_n;

  // Ablation: identical setup trained on the L x K support pairs only.
  const SupportSet support = read_support_manifest(dir / "support.manifest");
  const auto background = read_id_list(dir / "background.ids");
  const MinedPairSet support_pairs = pairs_from_support(support, 0.15, 21, background);
  write_pair_set(dir / "support_pairs.json", support_pairs);
  stage_train(dir / "support_pairs.json", dir / "word_feats.emb", dir / "grids", tc, 16,
              dir / "support_checkpoint.bin", dir / "support_history.json");
  const auto support_cls =
      stage_eval_fewshot(dir / "support_checkpoint.bin", dir / "test.manifest", 1000, 5, 33,
                         dir / "support_fewshot_report.json");
  g_end_to_end.support_accuracy = support_cls.accuracy;
}

Outcome check_end_to_end() {
  if (!g_end_to_end.ran) run_end_to_end();
  std::ostringstream os;
  os << "accuracy = " << g_end_to_end.mined_accuracy
     << " (need >= 0.9), macro P@N = " << g_end_to_end.mined_p_at_n << " (need >= 0.9)";
  return {g_end_to_end.mined_accuracy >= 0.9 && g_end_to_end.mined_p_at_n >= 0.9, os.str()};
}

Outcome check_no_mining_ablation() {
  if (!g_end_to_end.ran) run_end_to_end();
  const double gap = g_end_to_end.mined_accuracy - g_end_to_end.support_accuracy;
  std::ostringstream os;
  os << "mined " << g_end_to_end.mined_accuracy << " vs support-only "
     << g_end_to_end.support_accuracy << ", gap = " << gap << " (need >= 0.10)";
  return {gap >= 0.10, os.str()};
}

// --- 9. chance floor -------------------------------------------------------------

Outcome check_chance_floor() {
  const fs::path dir = g_work / "end_to_end";
  if (!fs::exists(dir / "test.manifest")) generate_synthetic(separable_spec(), dir);

  const TestManifest manifest = read_test_manifest(dir / "test.manifest");
  TestSet test_set;
  FeatureStore store;
  store.words = read_word_features(manifest.word_feats);
  for (const auto& [id, label] : manifest.queries) test_set.queries_by_class[label].push_back(id);
  for (const auto& [id, label] : manifest.images) {
    test_set.images_by_class[label].push_back(id);
    store.grids[id] = load_grid(manifest.grids_dir, id);
  }

  // Accuracy of an untrained model, replicated over independent random
  // initializations; the replicate mean must sit within three standard
  // errors of chance.
  const int replicates = 25;
  std::vector<double> accuracies;
  for (int r = 0; r < replicates; ++r) {
    const ModelParams params =
        ModelParams::random_init(16, 16, 16, mix64(0xC0FFEE + static_cast<std::uint64_t>(r)));
    const auto episodes =
        sample_episodes(test_set, 5, 1000, mix64(0xE0 + static_cast<std::uint64_t>(r)));
    accuracies.push_back(evaluate_classification(params, episodes, store).accuracy);
  }
  double mean = 0.0;
  for (double a : accuracies) mean += a;
  mean /= replicates;
  double var = 0.0;
  for (double a : accuracies) var += (a - mean) * (a - mean);
  var /= (replicates - 1);
  const double se = std::sqrt(var / replicates);

  std::ostringstream os;
  os << "untrained accuracy = " << mean << " +/- " << se << " over " << replicates
     << " inits x 1000 episodes (need within 3 SE of 0.2)";
  return {std::abs(mean - 0.2) <= 3.0 * se, os.str()};
}

// --- 10. determinism --------------------------------------------------------------

bool files_identical(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

Outcome check_determinism() {
  const fs::path root = g_work / "det_runs";
  const fs::path snapshot = g_work / "det_snapshot";

  RunConfig config;
  config.ways = 3;
  config.shots = 2;
  config.n = 8;
  config.val_fraction = 0.2;
  config.n_pos = 2;
  config.n_neg = 3;
  config.epochs = 3;
  config.patience = 3;
  config.d_emb = 8;
  config.episodes = 20;
  config.queries_per_class = 3;
  config.seed = 99;
  config.use_synthetic = true;
  config.synthetic.utterances_per_class = 8;
  config.synthetic.pool_images_per_class = 8;
  config.synthetic.background_images = 12;
  config.synthetic.test_queries_per_class = 4;
  config.synthetic.test_images_per_class = 4;
  config.synthetic.imposter_images = 8;

  fs::remove_all(root);
  fs::remove_all(snapshot);
  const PipelineResult first = run_pipeline(config, root);
  fs::create_directories(snapshot);
  fs::copy(first.run_dir, snapshot, fs::copy_options::recursive);
  fs::remove_all(first.run_dir);
  const PipelineResult second = run_pipeline(config, root);

  // Compare the full artifact trees byte for byte.
  std::size_t compared = 0;
  std::vector<std::string> diffs;
  for (const auto& entry : fs::recursive_directory_iterator(snapshot)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), snapshot);
    ++compared;
    if (!files_identical(entry.path(), second.run_dir / rel)) {
      diffs.push_back(rel.string());
    }
  }
  for (const auto& entry : fs::recursive_directory_iterator(second.run_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), second.run_dir);
    if (!fs::exists(snapshot / rel)) diffs.push_back(rel.string() + " (extra)");
  }

  std::ostringstream os;
  os << compared << " artifacts compared, " << diffs.size() << " differ";
  for (const auto& d : diffs) os << " [" << d << "]";
  return {diffs.empty(), os.str()};
}

}  // namespace

int main() {
  g_work = fs::temp_directory_path() / "wordvision_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"alignment oracle", check_alignment_oracle},
      {"dtw oracle", check_dtw_oracle},
      {"gradient check", check_gradient},
      {"closed-form loss", check_closed_form_loss},
      {"noiseless mining", check_noiseless_mining},
      {"unit search beats frame dtw", check_directional_claim},
      {"end-to-end learning", check_end_to_end},
      {"no-mining ablation", check_no_mining_ablation},
      {"chance floor", check_chance_floor},
      {"determinism", check_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s — %s (%s; %.1fs)\n", outcome.pass ? "PASS" : "FAIL", c.name.c_str(),
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures == 0) fs::remove_all(g_work);
  return failures;
}
