#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wordvision/model.hpp"

namespace wv {

// Per-class test items for episodic evaluation.
struct TestSet {
  std::map<std::string, std::vector<std::string>> queries_by_class;  // word ids
  std::map<std::string, std::vector<std::string>> images_by_class;   // image ids

  void validate(int ways) const;
};

// One query and one matching-set image per class.
struct Episode {
  std::vector<std::pair<std::string, std::string>> queries;   // (class, word id)
  std::vector<std::pair<std::string, std::string>> matching;  // (class, image id)
};

std::vector<Episode> sample_episodes(const TestSet& test_set, int ways, int count,
                                     std::uint64_t seed);

struct EpisodeResult {
  std::vector<std::string> predictions;  // per query, predicted class
  double accuracy = 0.0;
};

// Each query picks the matching-set image with the highest similarity score;
// score ties resolve to the smaller class label.
EpisodeResult classify_episode(const ModelParams& params, const Episode& episode,
                               const FeatureStore& store);

struct ClassificationReport {
  int episodes = 0;
  int ways = 0;
  double accuracy = 0.0;
  double stderr_episodes = 0.0;  // standard error over per-episode accuracies
  std::map<std::string, double> per_class_accuracy;
};

ClassificationReport evaluate_classification(const ModelParams& params,
                                             const std::vector<Episode>& episodes,
                                             const FeatureStore& store);

// Element-wise mean of raw feature vectors.
std::vector<double> average_queries(const std::vector<std::vector<double>>& words);

struct RetrievalPool {
  // (image id, gold class labels; empty for imposters)
  std::vector<std::pair<std::string, std::set<std::string>>> images;
  // class label -> averaged query. Raw feature vectors by default; unit-norm
  // audio embeddings when queries were averaged after projection.
  std::map<std::string, std::vector<double>> queries;
  bool queries_are_embeddings = false;
};

struct RankedList {
  std::string class_label;
  std::vector<std::string> image_ids;  // score descending, ties by id ascending
  double p_at_n = 0.0;
  std::size_t n = 0;  // true depiction count in the pool
};

struct RetrievalReport {
  std::vector<RankedList> per_class;
  std::vector<std::string> skipped_classes;  // N = 0
  double macro_p_at_n = 0.0;
};

// Ranking helpers, shared by retrieval and tests. rank_by_score sorts ids by
// score descending with id-ascending tie-break; p_at_n counts gold hits in
// the top n.
std::vector<std::string> rank_by_score(std::vector<std::pair<std::string, double>> scored);
double p_at_n(const std::vector<std::string>& ranked, const std::set<std::string>& gold_ids,
              std::size_t n);

RetrievalReport retrieve(const ModelParams& params, const RetrievalPool& pool,
                         const FeatureStore& store);

}  // namespace wv
