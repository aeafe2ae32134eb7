#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wordvision/embeddings.hpp"
#include "wordvision/qbe.hpp"

namespace wv {

struct SupportItem {
  std::string class_label;
  std::string word_utterance;
  int span_begin = 0;
  int span_end = 0;
  std::string image_id;
};

// The K-shot L-way ground-truth word-image pairs.
struct SupportSet {
  int ways = 0;
  int shots = 0;
  std::vector<SupportItem> items;
  // Companion files, resolved relative to the manifest.
  std::string units_file;
  std::string images_file;

  void validate() const;
  std::vector<std::string> class_labels() const;
};

enum class Split : std::uint8_t { Train = 0, Validation = 1 };

struct MinedPair {
  std::string word_id;  // utterance id of the mined word
  std::string image_id;
  int word_span_begin = 0;
  int word_span_end = 0;
  Split split = Split::Train;
};

// Mined word-image pairs per class plus the background-negative image pool.
struct MinedPairSet {
  // class label -> pairs, rank order preserved from mining
  std::map<std::string, std::vector<MinedPair>> pairs_by_class;
  std::vector<std::string> background_image_ids;

  std::vector<std::string> class_labels() const;
  std::vector<const MinedPair*> split_pairs(const std::string& label, Split split) const;
  void validate() const;
};

// Rank-i word is paired with rank-i image, truncated to n per class; the
// result is split into train/validation with a seeded shuffle.
MinedPairSet build_mined_pairs(const std::vector<MinedWord>& words,
                               const std::vector<ImageRanking>& images, int n,
                               double val_fraction, std::uint64_t seed,
                               std::vector<std::string> background_image_ids);

// Pairs taken directly from the support set (the no-mining baseline).
MinedPairSet pairs_from_support(const SupportSet& support, double val_fraction,
                                std::uint64_t seed,
                                std::vector<std::string> background_image_ids);

// One training-step sample: anchor pair plus positive/negative/background
// company. positives_with_replacement is set when the anchor's class had
// fewer than n_pos other pairs.
struct SampledBundle {
  std::string anchor_class;
  MinedPair anchor;
  std::vector<MinedPair> positives;            // n_pos, anchor's class
  std::vector<MinedPair> negatives;            // n_neg, other classes
  std::vector<std::string> background_images;  // n_neg
  bool positives_with_replacement = false;
};

// anchor_index indexes the train pairs of anchor_class. Positives are drawn
// without replacement from the anchor's class (excluding the anchor itself),
// negatives from the union of the other classes' train pairs, background
// images from the background pool.
SampledBundle sample_bundle(const MinedPairSet& pairs, const std::string& anchor_class,
                            std::size_t anchor_index, int n_pos, int n_neg,
                            std::uint64_t seed);

// Validation triplets built from the validation split: for each validation
// pair, a same-class positive image and an other-class negative image give
// two triplets (anchor image vs negative, positive image vs negative).
struct ValidationTriplet {
  std::string word_id;
  std::string positive_image_id;
  std::string negative_image_id;
};

std::vector<ValidationTriplet> make_validation_triplets(const MinedPairSet& pairs,
                                                        std::uint64_t seed);

}  // namespace wv
