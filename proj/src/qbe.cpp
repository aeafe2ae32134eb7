#include "wordvision/qbe.hpp"

#include <algorithm>

#include "wordvision/common.hpp"

namespace wv {

void QueryBank::validate() const {
  if (classes.empty()) throw MalformedQueryBank("query bank has no classes");
  std::set<std::string> seen;
  const std::size_t shots = classes.front().second.size();
  for (const auto& [label, queries] : classes) {
    if (!seen.insert(label).second) {
      throw MalformedQueryBank("duplicate class label " + label);
    }
    if (queries.empty()) {
      throw MalformedQueryBank("class " + label + " has zero queries");
    }
    if (queries.size() != shots) {
      throw MalformedQueryBank("class " + label + " has " +
                               std::to_string(queries.size()) + " queries, expected " +
                               std::to_string(shots));
    }
  }
}

namespace {

void sort_entries(std::vector<RankingEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
    if (a.best_score != b.best_score) return a.best_score > b.best_score;
    return a.utterance_id < b.utterance_id;
  });
}

}  // namespace

std::vector<ClassRanking> search_corpus(const QueryBank& queries,
                                        const std::vector<SegmentedUtterance>& corpus,
                                        const ScoringParams& scoring) {
  queries.validate();
  if (corpus.empty()) throw EmptyInput("search_corpus: empty corpus");
  {
    std::set<std::string> ids;
    for (const SegmentedUtterance& u : corpus) {
      if (!ids.insert(u.utterance_id).second) {
        throw Error("search_corpus: duplicate corpus utterance id " + u.utterance_id);
      }
    }
  }

  std::vector<ClassRanking> rankings;
  rankings.reserve(queries.classes.size());
  for (const auto& [label, class_queries] : queries.classes) {
    ClassRanking ranking;
    ranking.class_label = label;
    ranking.entries.resize(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t u) {
      RankingEntry entry;
      entry.utterance_id = corpus[u].utterance_id;
      bool first = true;
      for (std::size_t k = 0; k < class_queries.size(); ++k) {
        AlignmentResult r = nw_align(class_queries[k], corpus[u], scoring);
        if (first || r.score > entry.best_score) {
          first = false;
          entry.best_score = r.score;
          entry.best_query_index = static_cast<int>(k);
          entry.span_begin = r.span_begin;
          entry.span_end = r.span_end;
        }
      }
      ranking.entries[u] = std::move(entry);
    });
    sort_entries(ranking.entries);
    rankings.push_back(std::move(ranking));
  }
  return rankings;
}

std::vector<ClassRanking> dtw_search_corpus(
    const std::vector<std::pair<std::string, std::vector<FrameFeatureSequence>>>& queries,
    const std::vector<FrameFeatureSequence>& corpus) {
  if (queries.empty()) throw MalformedQueryBank("dtw_search_corpus: no classes");
  if (corpus.empty()) throw EmptyInput("dtw_search_corpus: empty corpus");

  std::vector<ClassRanking> rankings;
  rankings.reserve(queries.size());
  for (const auto& [label, class_queries] : queries) {
    if (class_queries.empty()) {
      throw MalformedQueryBank("dtw_search_corpus: class " + label + " has zero queries");
    }
    ClassRanking ranking;
    ranking.class_label = label;
    ranking.entries.resize(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t u) {
      RankingEntry entry;
      entry.utterance_id = corpus[u].utterance_id;
      bool first = true;
      for (std::size_t k = 0; k < class_queries.size(); ++k) {
        const double score = -dtw_distance(class_queries[k], corpus[u]);
        if (first || score > entry.best_score) {
          first = false;
          entry.best_score = score;
          entry.best_query_index = static_cast<int>(k);
        }
      }
      entry.span_begin = 0;
      entry.span_end = corpus[u].frames();
      ranking.entries[u] = std::move(entry);
    });
    sort_entries(ranking.entries);
    rankings.push_back(std::move(ranking));
  }
  return rankings;
}

std::vector<MinedWord> take_top_n(const ClassRanking& ranking, int n) {
  if (n < 1) throw ConfigError("take_top_n: n must be >= 1");
  const std::size_t count = std::min(ranking.entries.size(), static_cast<std::size_t>(n));
  std::vector<MinedWord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const RankingEntry& e = ranking.entries[i];
    out.push_back({e.utterance_id, ranking.class_label, e.span_begin, e.span_end,
                   e.best_score});
  }
  return out;
}

F1Report evaluate_f1(const std::vector<MinedWord>& mined,
                     const std::map<std::string, std::set<std::string>>& gold_labels) {
  F1Report report;

  // Gold occurrence counts per class over the whole corpus.
  for (const auto& [utt, labels] : gold_labels) {
    for (const auto& label : labels) report.per_class[label].gold += 1;
  }
  for (const MinedWord& w : mined) {
    auto it = gold_labels.find(w.utterance_id);
    if (it == gold_labels.end()) {
      throw MissingGold("evaluate_f1: no gold labels for utterance " + w.utterance_id);
    }
    F1Counts& c = report.per_class[w.class_label];
    c.mined += 1;
    if (it->second.count(w.class_label) > 0) c.true_positives += 1;
  }
  for (const auto& [label, counts] : report.per_class) {
    report.micro.true_positives += counts.true_positives;
    report.micro.mined += counts.mined;
    report.micro.gold += counts.gold;
  }
  return report;
}

}  // namespace wv
