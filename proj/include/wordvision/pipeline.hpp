#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "wordvision/eval.hpp"
#include "wordvision/io.hpp"
#include "wordvision/synthetic.hpp"

namespace wv {

struct RunConfig {
  std::string data_dir;  // existing dataset; empty when synthetic.* is given

  int ways = 5;
  int shots = 5;

  int n = 600;  // mined examples per class
  double match = 1.0;
  double mismatch = -1.0;
  double gap = -1.0;
  double val_fraction = 0.1;

  int n_pos = 5;
  int n_neg = 11;
  double lr = 1e-3;
  int epochs = 100;
  int patience = 10;
  int d_emb = 16;

  int episodes = 1000;
  int queries_per_class = 20;

  std::uint64_t seed = 0;
  int workers = 0;

  bool use_synthetic = false;
  SyntheticSpec synthetic;

  void validate() const;
  ScoringParams scoring() const { return {match, mismatch, gap, true}; }
  // Synthetic spec with ways/shots/seed folded in.
  SyntheticSpec effective_synthetic() const;
};

// Key-value config file, one "key = value" per line, '#' comments. Every key
// must be known; the whole file is validated before any stage runs.
RunConfig parse_run_config(const std::filesystem::path& path);

// All effective settings as sorted "key = value" lines; the run directory
// name is a hash of this text.
std::string canonical_config_text(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

// --- pipeline stages --------------------------------------------------------
// Each stage reads its inputs from files and persists its outputs, so any
// stage can be rerun in isolation.

void stage_segment(const std::filesystem::path& units_file,
                   const std::filesystem::path& out_file);

std::vector<MinedWord> stage_search(const std::filesystem::path& queries_manifest,
                                    const std::filesystem::path& corpus_file,
                                    const ScoringParams& scoring, int n,
                                    const std::filesystem::path& out_file);

std::vector<ImageRanking> stage_mine_images(const std::filesystem::path& queries_manifest,
                                            const std::filesystem::path& pool_emb, int n,
                                            const std::filesystem::path& out_file);

MinedPairSet stage_build_pairs(const std::filesystem::path& words_file,
                               const std::filesystem::path& images_file,
                               const std::filesystem::path& background_file, int n,
                               double val_fraction, std::uint64_t seed,
                               const std::filesystem::path& out_file);

TrainResult stage_train(const std::filesystem::path& pairs_file,
                        const std::filesystem::path& word_feats,
                        const std::filesystem::path& grids_dir, const TrainConfig& config,
                        int d_emb, const std::filesystem::path& checkpoint_out,
                        const std::filesystem::path& history_out);

ClassificationReport stage_eval_fewshot(const std::filesystem::path& checkpoint,
                                        const std::filesystem::path& test_manifest,
                                        int episodes, int ways, std::uint64_t seed,
                                        const std::filesystem::path& report_out);

// Queries are averaged over raw features by default; with
// average_after_projection the per-word audio embeddings are averaged and
// renormalized instead.
RetrievalReport stage_eval_retrieval(const std::filesystem::path& checkpoint,
                                     const std::filesystem::path& pool_manifest,
                                     int queries_per_class, std::uint64_t seed,
                                     const std::filesystem::path& report_out,
                                     bool average_after_projection = false);

struct PipelineResult {
  std::filesystem::path run_dir;
  double classification_accuracy = 0.0;
  double retrieval_macro_p_at_n = 0.0;
};

// Runs every stage in order under runs_root/<config hash>. Rerunning with an
// identical config reproduces byte-identical artifacts.
PipelineResult run_pipeline(const RunConfig& config,
                            const std::filesystem::path& runs_root);

}  // namespace wv
