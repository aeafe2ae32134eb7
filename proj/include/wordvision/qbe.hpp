#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wordvision/align.hpp"
#include "wordvision/dtw.hpp"
#include "wordvision/units.hpp"

namespace wv {

// Per class: the K spoken-word query examples from the support set.
struct QueryBank {
  // class label -> K queries; class order is preserved in search output
  std::vector<std::pair<std::string, std::vector<SegmentedUtterance>>> classes;

  void validate() const;
};

struct RankingEntry {
  std::string utterance_id;
  double best_score = 0.0;
  int best_query_index = 0;
  int span_begin = 0;  // matched target span, segment indices
  int span_end = 0;
};

// Sorted by best_score descending, ties by utterance_id ascending. The score
// of an utterance is the max over the class's K queries.
struct ClassRanking {
  std::string class_label;
  std::vector<RankingEntry> entries;
};

struct MinedWord {
  std::string utterance_id;
  std::string class_label;
  int span_begin = 0;
  int span_end = 0;
  double score = 0.0;
};

struct F1Counts {
  std::size_t true_positives = 0;
  std::size_t mined = 0;
  std::size_t gold = 0;

  double precision() const { return mined == 0 ? 0.0 : double(true_positives) / mined; }
  double recall() const { return gold == 0 ? 0.0 : double(true_positives) / gold; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

struct F1Report {
  std::map<std::string, F1Counts> per_class;
  F1Counts micro;
};

// Scores every corpus utterance against every query and reduces per class to
// the max over the K queries (ties prefer the lower query index).
std::vector<ClassRanking> search_corpus(const QueryBank& queries,
                                        const std::vector<SegmentedUtterance>& corpus,
                                        const ScoringParams& scoring = {});

// Frame-level DTW baseline over the same corpus: best_score is the negated
// normalized DTW distance, so ranking semantics match search_corpus. Spans
// cover the whole utterance (DTW does not localize).
std::vector<ClassRanking> dtw_search_corpus(
    const std::vector<std::pair<std::string, std::vector<FrameFeatureSequence>>>& queries,
    const std::vector<FrameFeatureSequence>& corpus);

// First min(n, |entries|) ranking entries as mined words.
std::vector<MinedWord> take_top_n(const ClassRanking& ranking, int n);

// A mined word is a true positive iff its class is in the utterance's gold
// label set. Counting is at utterance level.
F1Report evaluate_f1(const std::vector<MinedWord>& mined,
                     const std::map<std::string, std::set<std::string>>& gold_labels);

}  // namespace wv
