// Command-line front end for the word-image few-shot pipeline. Subcommands
// map one-to-one onto pipeline stages; `run-all` chains them under a run
// directory named by the config hash.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wordvision/common.hpp"
#include "wordvision/pipeline.hpp"
#include "wordvision/simd.hpp"

namespace {

struct GenArgs {
  std::string out;
  wv::SyntheticSpec spec;
};

int run_gen(const GenArgs& args) {
  const wv::SyntheticStats stats = wv::generate_synthetic(args.spec, args.out);
  std::cout << "generated " << args.out << " (" << stats.planted_segments
            << " planted segments, " << stats.corrupted_segments << " corrupted)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-shot word-image pair mining, training and evaluation"};
  app.require_subcommand(1);

  // gen-synthetic
  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "generate a synthetic dataset");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--classes", gen.spec.classes, "number of classes");
  gen_cmd->add_option("--vocab", gen.spec.unit_vocab, "unit vocabulary size");
  gen_cmd->add_option("--word-len-min", gen.spec.word_len_min);
  gen_cmd->add_option("--word-len-max", gen.spec.word_len_max);
  gen_cmd->add_option("--utt-len-min", gen.spec.utt_len_min);
  gen_cmd->add_option("--utt-len-max", gen.spec.utt_len_max);
  gen_cmd->add_option("--substitution-noise", gen.spec.substitution_noise);
  gen_cmd->add_option("--separation", gen.spec.cluster_separation);
  gen_cmd->add_option("--frame-noise", gen.spec.frame_noise);
  gen_cmd->add_option("--word-noise", gen.spec.word_noise);
  gen_cmd->add_option("--image-noise", gen.spec.image_noise);
  gen_cmd->add_option("--utterances-per-class", gen.spec.utterances_per_class);
  gen_cmd->add_option("--pool-images-per-class", gen.spec.pool_images_per_class);
  gen_cmd->add_option("--background-images", gen.spec.background_images);
  gen_cmd->add_option("--shots", gen.spec.support_shots, "support examples per class");
  gen_cmd->add_option("--test-queries-per-class", gen.spec.test_queries_per_class);
  gen_cmd->add_option("--test-images-per-class", gen.spec.test_images_per_class);
  gen_cmd->add_option("--imposter-images", gen.spec.imposter_images);
  gen_cmd->add_option("--seed", gen.spec.seed);

  // segment
  std::string seg_units, seg_out;
  auto* seg_cmd = app.add_subcommand("segment", "merge unit runs into segments");
  seg_cmd->add_option("--units", seg_units, "units jsonl")->required();
  seg_cmd->add_option("--out", seg_out, "segments jsonl")->required();

  // search
  std::string search_queries, search_corpus, search_out;
  int search_n = 600;
  wv::ScoringParams scoring;
  auto* search_cmd = app.add_subcommand("search", "query-by-example search over a corpus");
  search_cmd->add_option("--queries", search_queries, "support-set manifest")->required();
  search_cmd->add_option("--corpus", search_corpus, "corpus jsonl (units or segments)")
      ->required();
  search_cmd->add_option("--n", search_n, "mined words per class");
  search_cmd->add_option("--match", scoring.match);
  search_cmd->add_option("--mismatch", scoring.mismatch);
  search_cmd->add_option("--gap", scoring.gap);
  search_cmd->add_option("--out", search_out, "mined words json")->required();

  // mine-images
  std::string mine_queries, mine_pool, mine_out;
  int mine_n = 600;
  auto* mine_cmd = app.add_subcommand("mine-images", "rank pool images per class");
  mine_cmd->add_option("--support", mine_queries, "support-set manifest")->required();
  mine_cmd->add_option("--pool", mine_pool, "pool embedding store")->required();
  mine_cmd->add_option("--n", mine_n, "mined images per class");
  mine_cmd->add_option("--out", mine_out, "image rankings json")->required();

  // build-pairs
  std::string bp_words, bp_images, bp_background, bp_out;
  int bp_n = 600;
  double bp_val_fraction = 0.1;
  std::uint64_t bp_seed = 0;
  auto* bp_cmd = app.add_subcommand("build-pairs", "pair mined words with mined images");
  bp_cmd->add_option("--words", bp_words, "mined words json")->required();
  bp_cmd->add_option("--images", bp_images, "image rankings json")->required();
  bp_cmd->add_option("--background", bp_background, "background image id list")->required();
  bp_cmd->add_option("--n", bp_n, "pairs per class");
  bp_cmd->add_option("--val-fraction", bp_val_fraction);
  bp_cmd->add_option("--seed", bp_seed);
  bp_cmd->add_option("--out", bp_out, "pair set json")->required();

  // train
  std::string tr_pairs, tr_word_feats, tr_grids, tr_checkpoint, tr_history;
  int tr_d_emb = 16;
  wv::TrainConfig train_config;
  auto* tr_cmd = app.add_subcommand("train", "train the attention scorer on mined pairs");
  tr_cmd->add_option("--pairs", tr_pairs, "pair set json")->required();
  tr_cmd->add_option("--word-feats", tr_word_feats, "word feature store")->required();
  tr_cmd->add_option("--grids", tr_grids, "grid directory")->required();
  tr_cmd->add_option("--checkpoint", tr_checkpoint, "checkpoint output")->required();
  tr_cmd->add_option("--history", tr_history, "history json output")->required();
  tr_cmd->add_option("--d-emb", tr_d_emb, "shared embedding dimension");
  tr_cmd->add_option("--lr", train_config.lr);
  tr_cmd->add_option("--epochs", train_config.epochs);
  tr_cmd->add_option("--n-pos", train_config.n_pos);
  tr_cmd->add_option("--n-neg", train_config.n_neg);
  tr_cmd->add_option("--patience", train_config.patience);
  tr_cmd->add_option("--seed", train_config.seed);
  tr_cmd->add_flag("--verbose", train_config.verbose);

  // eval-fewshot
  std::string ef_checkpoint, ef_test, ef_report;
  int ef_episodes = 1000;
  int ef_ways = 5;
  std::uint64_t ef_seed = 0;
  auto* ef_cmd = app.add_subcommand("eval-fewshot", "episodic classification accuracy");
  ef_cmd->add_option("--checkpoint", ef_checkpoint)->required();
  ef_cmd->add_option("--test", ef_test, "test manifest")->required();
  ef_cmd->add_option("--episodes", ef_episodes);
  ef_cmd->add_option("--ways", ef_ways);
  ef_cmd->add_option("--seed", ef_seed);
  ef_cmd->add_option("--report", ef_report, "report json output")->required();

  // eval-retrieval
  std::string er_checkpoint, er_pool, er_report;
  int er_queries = 20;
  std::uint64_t er_seed = 0;
  bool er_avg_after = false;
  auto* er_cmd = app.add_subcommand("eval-retrieval", "few-shot retrieval P@N");
  er_cmd->add_option("--checkpoint", er_checkpoint)->required();
  er_cmd->add_option("--pool", er_pool, "pool manifest")->required();
  er_cmd->add_option("--queries-per-class", er_queries);
  er_cmd->add_option("--seed", er_seed);
  er_cmd->add_flag("--average-after-projection", er_avg_after,
                   "average query embeddings instead of raw features");
  er_cmd->add_option("--report", er_report, "report json output")->required();

  // run-all
  std::string ra_config, ra_runs = "runs";
  auto* ra_cmd = app.add_subcommand("run-all", "run every stage from a config file");
  ra_cmd->add_option("--config", ra_config, "run config file")->required();
  ra_cmd->add_option("--runs-dir", ra_runs, "root directory for run outputs");

  int workers = 0;
  app.add_option("--workers", workers, "worker thread count (overrides env)");

  CLI11_PARSE(app, argc, argv);

  if (workers > 0) wv::set_worker_override(workers);

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (seg_cmd->parsed()) {
      wv::stage_segment(seg_units, seg_out);
      std::cout << "wrote " << seg_out << "\n";
      return 0;
    }
    if (search_cmd->parsed()) {
      const auto mined = wv::stage_search(search_queries, search_corpus, scoring, search_n,
                                          search_out);
      std::cout << "mined " << mined.size() << " words -> " << search_out << "\n";
      return 0;
    }
    if (mine_cmd->parsed()) {
      const auto rankings = wv::stage_mine_images(mine_queries, mine_pool, mine_n, mine_out);
      std::size_t total = 0;
      for (const auto& r : rankings) total += r.entries.size();
      std::cout << "mined " << total << " images -> " << mine_out << "\n";
      return 0;
    }
    if (bp_cmd->parsed()) {
      const auto pairs = wv::stage_build_pairs(bp_words, bp_images, bp_background, bp_n,
                                               bp_val_fraction, bp_seed, bp_out);
      std::size_t total = 0;
      for (const auto& [label, class_pairs] : pairs.pairs_by_class) {
        total += class_pairs.size();
      }
      std::cout << "built " << total << " pairs -> " << bp_out << "\n";
      return 0;
    }
    if (tr_cmd->parsed()) {
      const auto result = wv::stage_train(tr_pairs, tr_word_feats, tr_grids, train_config,
                                          tr_d_emb, tr_checkpoint, tr_history);
      std::cout << "best epoch " << result.best_epoch << " val accuracy "
                << result.best_val_accuracy << " -> " << tr_checkpoint << "\n";
      return 0;
    }
    if (ef_cmd->parsed()) {
      const auto report = wv::stage_eval_fewshot(ef_checkpoint, ef_test, ef_episodes,
                                                 ef_ways, ef_seed, ef_report);
      std::cout << "accuracy " << report.accuracy << " over " << report.episodes
                << " episodes -> " << ef_report << "\n";
      return 0;
    }
    if (er_cmd->parsed()) {
      const auto report = wv::stage_eval_retrieval(er_checkpoint, er_pool, er_queries,
                                                   er_seed, er_report, er_avg_after);
      std::cout << "macro P@N " << report.macro_p_at_n << " -> " << er_report << "\n";
      return 0;
    }
    if (ra_cmd->parsed()) {
      const wv::RunConfig config = wv::parse_run_config(ra_config);
      const wv::PipelineResult result = wv::run_pipeline(config, ra_runs);
      std::cout << "run dir: " << result.run_dir.string() << "\n"
                << "classification accuracy: " << result.classification_accuracy << "\n"
                << "retrieval macro P@N: " << result.retrieval_macro_p_at_n << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
