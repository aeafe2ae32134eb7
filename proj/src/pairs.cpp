#include "wordvision/pairs.hpp"

#include <algorithm>
#include <set>

#include "wordvision/common.hpp"

namespace wv {

void SupportSet::validate() const {
  if (ways < 1 || shots < 1) {
    throw ConfigError("support set: ways and shots must be >= 1");
  }
  std::map<std::string, int> counts;
  for (const SupportItem& item : items) counts[item.class_label] += 1;
  if (static_cast<int>(counts.size()) != ways) {
    throw ConfigError("support set: expected " + std::to_string(ways) +
                      " distinct classes, found " + std::to_string(counts.size()));
  }
  for (const auto& [label, count] : counts) {
    if (count != shots) {
      throw ConfigError("support set: class " + label + " has " + std::to_string(count) +
                        " items, expected " + std::to_string(shots));
    }
  }
}

std::vector<std::string> SupportSet::class_labels() const {
  std::vector<std::string> labels;
  for (const SupportItem& item : items) {
    if (std::find(labels.begin(), labels.end(), item.class_label) == labels.end()) {
      labels.push_back(item.class_label);
    }
  }
  return labels;
}

std::vector<std::string> MinedPairSet::class_labels() const {
  std::vector<std::string> labels;
  labels.reserve(pairs_by_class.size());
  for (const auto& [label, pairs] : pairs_by_class) labels.push_back(label);
  return labels;
}

std::vector<const MinedPair*> MinedPairSet::split_pairs(const std::string& label,
                                                        Split split) const {
  auto it = pairs_by_class.find(label);
  if (it == pairs_by_class.end()) {
    throw ClassMismatch("MinedPairSet: unknown class " + label);
  }
  std::vector<const MinedPair*> out;
  for (const MinedPair& p : it->second) {
    if (p.split == split) out.push_back(&p);
  }
  return out;
}

void MinedPairSet::validate() const {
  std::set<std::string> mined_images;
  for (const auto& [label, pairs] : pairs_by_class) {
    for (const MinedPair& p : pairs) mined_images.insert(p.image_id);
  }
  for (const std::string& id : background_image_ids) {
    if (mined_images.count(id) > 0) {
      throw ClassMismatch("background image " + id + " also appears among mined pairs");
    }
  }
}

namespace {

// Per-class split: validation gets round(frac * count), at least 1 and at
// most count - 1 when frac > 0 and the class has two or more pairs.
void assign_splits(std::vector<MinedPair>& pairs, double val_fraction, Rng& rng) {
  const std::size_t count = pairs.size();
  std::size_t val = 0;
  if (val_fraction > 0.0 && count >= 2) {
    val = static_cast<std::size_t>(val_fraction * static_cast<double>(count) + 0.5);
    val = std::max<std::size_t>(1, std::min(val, count - 1));
  }
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i = 0; i < count; ++i) {
    pairs[order[i]].split = i < val ? Split::Validation : Split::Train;
  }
}

}  // namespace

MinedPairSet build_mined_pairs(const std::vector<MinedWord>& words,
                               const std::vector<ImageRanking>& images, int n,
                               double val_fraction, std::uint64_t seed,
                               std::vector<std::string> background_image_ids) {
  if (n < 1) throw ConfigError("build_mined_pairs: n must be >= 1");
  if (val_fraction < 0.0 || val_fraction >= 1.0) {
    throw ConfigError("build_mined_pairs: val_fraction must be in [0, 1)");
  }

  std::map<std::string, std::vector<const MinedWord*>> words_by_class;
  for (const MinedWord& w : words) words_by_class[w.class_label].push_back(&w);

  std::map<std::string, const ImageRanking*> images_by_class;
  for (const ImageRanking& r : images) images_by_class[r.class_label] = &r;

  for (const auto& [label, _] : words_by_class) {
    if (images_by_class.count(label) == 0) {
      throw ClassMismatch("build_mined_pairs: class " + label + " has words but no images");
    }
  }
  for (const auto& [label, _] : images_by_class) {
    if (words_by_class.count(label) == 0) {
      throw ClassMismatch("build_mined_pairs: class " + label + " has images but no words");
    }
  }

  MinedPairSet out;
  out.background_image_ids = std::move(background_image_ids);
  Rng rng(seed);
  for (auto& [label, class_words] : words_by_class) {
    const auto& entries = images_by_class.at(label)->entries;
    const std::size_t count =
        std::min({class_words.size(), entries.size(), static_cast<std::size_t>(n)});
    std::vector<MinedPair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const MinedWord& w = *class_words[i];
      pairs.push_back({w.utterance_id, entries[i].image_id, w.span_begin, w.span_end,
                       Split::Train});
    }
    Rng class_rng = rng.fork(mix64(std::hash<std::string>{}(label)));
    assign_splits(pairs, val_fraction, class_rng);
    out.pairs_by_class[label] = std::move(pairs);
  }
  out.validate();
  return out;
}

MinedPairSet pairs_from_support(const SupportSet& support, double val_fraction,
                                std::uint64_t seed,
                                std::vector<std::string> background_image_ids) {
  support.validate();
  MinedPairSet out;
  out.background_image_ids = std::move(background_image_ids);
  Rng rng(seed);
  for (const SupportItem& item : support.items) {
    out.pairs_by_class[item.class_label].push_back(
        {item.word_utterance, item.image_id, item.span_begin, item.span_end, Split::Train});
  }
  for (auto& [label, pairs] : out.pairs_by_class) {
    Rng class_rng = rng.fork(mix64(std::hash<std::string>{}(label)));
    assign_splits(pairs, val_fraction, class_rng);
  }
  out.validate();
  return out;
}

SampledBundle sample_bundle(const MinedPairSet& pairs, const std::string& anchor_class,
                            std::size_t anchor_index, int n_pos, int n_neg,
                            std::uint64_t seed) {
  if (n_pos < 0) throw ConfigError("sample_bundle: n_pos must be >= 0");
  if (n_neg < 1) throw ConfigError("sample_bundle: n_neg must be >= 1");

  const auto anchor_pool = pairs.split_pairs(anchor_class, Split::Train);
  if (anchor_index >= anchor_pool.size()) {
    throw Error("sample_bundle: anchor index out of range for class " + anchor_class);
  }

  SampledBundle bundle;
  bundle.anchor_class = anchor_class;
  bundle.anchor = *anchor_pool[anchor_index];

  Rng rng(seed);

  // Positives: same class, anchor excluded.
  std::vector<const MinedPair*> positive_pool;
  for (std::size_t i = 0; i < anchor_pool.size(); ++i) {
    if (i != anchor_index) positive_pool.push_back(anchor_pool[i]);
  }
  if (n_pos > 0) {
    if (positive_pool.empty()) {
      throw InsufficientPool("sample_bundle: positives starved for class " + anchor_class);
    }
    if (positive_pool.size() >= static_cast<std::size_t>(n_pos)) {
      for (std::size_t idx :
           rng.sample_without_replacement(positive_pool.size(), static_cast<std::size_t>(n_pos))) {
        bundle.positives.push_back(*positive_pool[idx]);
      }
    } else {
      bundle.positives_with_replacement = true;
      for (int i = 0; i < n_pos; ++i) {
        bundle.positives.push_back(*positive_pool[rng.below(positive_pool.size())]);
      }
    }
  }

  // Negatives: union of the other classes' train pairs.
  std::vector<const MinedPair*> negative_pool;
  for (const auto& [label, class_pairs] : pairs.pairs_by_class) {
    if (label == anchor_class) continue;
    for (const MinedPair& p : class_pairs) {
      if (p.split == Split::Train) negative_pool.push_back(&p);
    }
  }
  if (negative_pool.size() < static_cast<std::size_t>(n_neg)) {
    throw InsufficientPool("sample_bundle: negatives starved (need " + std::to_string(n_neg) +
                           ", have " + std::to_string(negative_pool.size()) + ")");
  }
  for (std::size_t idx :
       rng.sample_without_replacement(negative_pool.size(), static_cast<std::size_t>(n_neg))) {
    bundle.negatives.push_back(*negative_pool[idx]);
  }

  // Background negatives.
  if (pairs.background_image_ids.size() < static_cast<std::size_t>(n_neg)) {
    throw InsufficientPool("sample_bundle: background images starved (need " +
                           std::to_string(n_neg) + ", have " +
                           std::to_string(pairs.background_image_ids.size()) + ")");
  }
  for (std::size_t idx : rng.sample_without_replacement(pairs.background_image_ids.size(),
                                                        static_cast<std::size_t>(n_neg))) {
    bundle.background_images.push_back(pairs.background_image_ids[idx]);
  }

  return bundle;
}

std::vector<ValidationTriplet> make_validation_triplets(const MinedPairSet& pairs,
                                                        std::uint64_t seed) {
  const auto labels = pairs.class_labels();
  Rng rng(seed);
  std::vector<ValidationTriplet> triplets;

  for (const std::string& label : labels) {
    auto val = pairs.split_pairs(label, Split::Validation);
    if (val.empty()) continue;
    // Same-class pool for the extra positive image; other validation pairs
    // preferred, train pairs as fallback. The anchor never appears here.
    std::vector<const MinedPair*> same_pool;
    if (val.size() >= 2) {
      same_pool = val;
    } else {
      same_pool = pairs.split_pairs(label, Split::Train);
    }
    // Other-class pool for negatives.
    std::vector<const MinedPair*> other_pool;
    for (const std::string& other : labels) {
      if (other == label) continue;
      for (const MinedPair* p : pairs.split_pairs(other, Split::Validation)) {
        other_pool.push_back(p);
      }
    }
    if (other_pool.empty()) {
      for (const std::string& other : labels) {
        if (other == label) continue;
        for (const MinedPair* p : pairs.split_pairs(other, Split::Train)) {
          other_pool.push_back(p);
        }
      }
    }
    if (other_pool.empty()) {
      throw InsufficientPool("make_validation_triplets: no other-class images for " + label);
    }
    for (std::size_t i = 0; i < val.size(); ++i) {
      const MinedPair* anchor = val[i];
      const MinedPair* neg = other_pool[rng.below(other_pool.size())];
      triplets.push_back({anchor->word_id, anchor->image_id, neg->image_id});
      const MinedPair* pos = nullptr;
      if (!same_pool.empty()) {
        do {
          pos = same_pool[rng.below(same_pool.size())];
        } while (pos == anchor && same_pool.size() > 1);
      }
      if (pos != nullptr && pos != anchor) {
        triplets.push_back({anchor->word_id, pos->image_id, neg->image_id});
      }
    }
  }
  if (triplets.empty()) {
    throw EmptyInput("make_validation_triplets: validation split is empty");
  }
  return triplets;
}

}  // namespace wv
