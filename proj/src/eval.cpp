#include "wordvision/eval.hpp"

#include <algorithm>
#include <cmath>

#include "wordvision/common.hpp"
#include "wordvision/simd.hpp"

namespace wv {

void TestSet::validate(int ways) const {
  if (static_cast<int>(queries_by_class.size()) != ways ||
      static_cast<int>(images_by_class.size()) != ways) {
    throw ConfigError("test set: expected " + std::to_string(ways) + " classes, found " +
                      std::to_string(queries_by_class.size()) + " query classes and " +
                      std::to_string(images_by_class.size()) + " image classes");
  }
  for (const auto& [label, ids] : queries_by_class) {
    if (ids.empty()) throw InsufficientPool("test set: class " + label + " has no queries");
    if (images_by_class.count(label) == 0) {
      throw ClassMismatch("test set: class " + label + " has queries but no images");
    }
  }
  for (const auto& [label, ids] : images_by_class) {
    if (ids.empty()) throw InsufficientPool("test set: class " + label + " has no images");
  }
}

std::vector<Episode> sample_episodes(const TestSet& test_set, int ways, int count,
                                     std::uint64_t seed) {
  test_set.validate(ways);
  if (count < 1) throw ConfigError("sample_episodes: count must be >= 1");
  std::vector<Episode> episodes;
  episodes.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  for (int e = 0; e < count; ++e) {
    Episode ep;
    for (const auto& [label, query_ids] : test_set.queries_by_class) {
      const auto& image_ids = test_set.images_by_class.at(label);
      ep.queries.push_back({label, query_ids[rng.below(query_ids.size())]});
      ep.matching.push_back({label, image_ids[rng.below(image_ids.size())]});
    }
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

EpisodeResult classify_episode(const ModelParams& params, const Episode& episode,
                               const FeatureStore& store) {
  if (episode.queries.empty() || episode.matching.empty()) {
    throw EmptyInput("classify_episode: empty episode");
  }
  EpisodeResult result;
  int correct = 0;
  for (const auto& [query_class, word_id] : episode.queries) {
    const auto& word = store.word(word_id);
    std::string best_class;
    double best_score = 0.0;
    bool first = true;
    for (const auto& [image_class, image_id] : episode.matching) {
      const double s = similarity(params, word, store.grid(image_id));
      if (first || s > best_score || (s == best_score && image_class < best_class)) {
        first = false;
        best_score = s;
        best_class = image_class;
      }
    }
    result.predictions.push_back(best_class);
    if (best_class == query_class) correct += 1;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(episode.queries.size());
  return result;
}

ClassificationReport evaluate_classification(const ModelParams& params,
                                             const std::vector<Episode>& episodes,
                                             const FeatureStore& store) {
  if (episodes.empty()) throw EmptyInput("evaluate_classification: no episodes");
  ClassificationReport report;
  report.episodes = static_cast<int>(episodes.size());
  report.ways = static_cast<int>(episodes.front().queries.size());

  std::vector<double> per_episode(episodes.size());
  std::vector<std::vector<std::pair<std::string, int>>> class_hits(episodes.size());
  parallel_for(episodes.size(), [&](std::size_t i) {
    const EpisodeResult r = classify_episode(params, episodes[i], store);
    per_episode[i] = r.accuracy;
    for (std::size_t q = 0; q < episodes[i].queries.size(); ++q) {
      class_hits[i].push_back({episodes[i].queries[q].first,
                               r.predictions[q] == episodes[i].queries[q].first ? 1 : 0});
    }
  });

  double mean = 0.0;
  for (double a : per_episode) mean += a;
  mean /= static_cast<double>(per_episode.size());
  report.accuracy = mean;

  double var = 0.0;
  for (double a : per_episode) var += (a - mean) * (a - mean);
  if (per_episode.size() > 1) {
    var /= static_cast<double>(per_episode.size() - 1);
    report.stderr_episodes = std::sqrt(var / static_cast<double>(per_episode.size()));
  }

  std::map<std::string, std::pair<long, long>> counts;  // hits, totals
  for (const auto& hits : class_hits) {
    for (const auto& [label, hit] : hits) {
      counts[label].first += hit;
      counts[label].second += 1;
    }
  }
  for (const auto& [label, c] : counts) {
    report.per_class_accuracy[label] =
        static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return report;
}

std::vector<double> average_queries(const std::vector<std::vector<double>>& words) {
  if (words.empty()) throw EmptyInput("average_queries: no words");
  const std::size_t dim = words.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& w : words) {
    if (w.size() != dim) throw DimensionMismatch("average_queries: ragged word features");
    simd::axpy(1.0, w.data(), mean.data(), dim);
  }
  simd::scale(mean.data(), 1.0 / static_cast<double>(words.size()), dim);
  return mean;
}

std::vector<std::string> rank_by_score(std::vector<std::pair<std::string, double>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> ids;
  ids.reserve(scored.size());
  for (auto& [id, _] : scored) ids.push_back(std::move(id));
  return ids;
}

double p_at_n(const std::vector<std::string>& ranked, const std::set<std::string>& gold_ids,
              std::size_t n) {
  if (n == 0) throw EmptyInput("p_at_n: n must be positive");
  std::size_t hits = 0;
  const std::size_t top = std::min(n, ranked.size());
  for (std::size_t i = 0; i < top; ++i) {
    if (gold_ids.count(ranked[i]) > 0) hits += 1;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

RetrievalReport retrieve(const ModelParams& params, const RetrievalPool& pool,
                         const FeatureStore& store) {
  if (pool.images.empty()) throw EmptyInput("retrieve: empty image pool");
  if (pool.queries.empty()) throw EmptyInput("retrieve: no queries");

  RetrievalReport report;
  double macro_sum = 0.0;
  std::size_t scored_classes = 0;
  for (const auto& [label, query] : pool.queries) {
    std::set<std::string> gold_ids;
    for (const auto& [image_id, labels] : pool.images) {
      if (labels.count(label) > 0) gold_ids.insert(image_id);
    }
    if (gold_ids.empty()) {
      report.skipped_classes.push_back(label);
      continue;
    }
    std::vector<std::pair<std::string, double>> scored(pool.images.size());
    parallel_for(pool.images.size(), [&](std::size_t i) {
      const EmbeddingGrid& grid = store.grid(pool.images[i].first);
      const double s = pool.queries_are_embeddings
                           ? similarity_from_embedding(params, query, grid)
                           : similarity(params, query, grid);
      scored[i] = {pool.images[i].first, s};
    });
    RankedList ranked;
    ranked.class_label = label;
    ranked.image_ids = rank_by_score(std::move(scored));
    ranked.n = gold_ids.size();
    ranked.p_at_n = p_at_n(ranked.image_ids, gold_ids, ranked.n);
    macro_sum += ranked.p_at_n;
    scored_classes += 1;
    report.per_class.push_back(std::move(ranked));
  }
  if (scored_classes > 0) {
    report.macro_p_at_n = macro_sum / static_cast<double>(scored_classes);
  }
  return report;
}

}  // namespace wv
