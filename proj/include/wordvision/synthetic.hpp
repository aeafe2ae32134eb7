#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wv {

// Desk-scale synthetic corpus: each class gets a canonical unit template and
// orthonormal feature directions; utterances embed noisy template copies
// between background context; images place class-signal pixels over noise.
struct SyntheticSpec {
  int classes = 5;
  int unit_vocab = 50;  // V; classes share it with a background inventory
  int word_len_min = 4;
  int word_len_max = 7;
  int utt_len_min = 14;  // total segments including the planted word
  int utt_len_max = 22;
  double substitution_noise = 0.0;  // per planted segment, in [0, 1)
  double cluster_separation = 4.0;  // class-signal magnitude, > 0

  int d_frame = 8;
  int d_aud = 16;
  int d_img = 16;
  int d_pix = 16;
  int grid_h = 4;
  int grid_w = 4;

  double frame_noise = 0.0;  // additive sigma on frame features
  double word_noise = 0.35;  // within-class sigma of word features
  double image_noise = 0.35; // pixel/background sigma of image features

  // Within-class variation: shared nuisance directions with per-item
  // coefficients, orthogonal to every class direction. A few shots
  // undersample it; a mined set averages it out.
  int style_dims = 4;
  double style_noise = 0.0;

  int utterances_per_class = 100;
  int pool_images_per_class = 100;
  int background_images = 100;
  int support_shots = 5;  // K
  int test_queries_per_class = 30;
  int test_images_per_class = 30;
  int imposter_images = 150;

  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticStats {
  long planted_segments = 0;
  long corrupted_segments = 0;
};

// Writes the full dataset (unit sequences, frame features, word features,
// image embeddings and grids, support set, gold labels, eval manifests)
// under out_dir. Deterministic given the spec.
SyntheticStats generate_synthetic(const SyntheticSpec& spec,
                                  const std::filesystem::path& out_dir);

// Class labels used by the generator: "class_00", "class_01", ...
std::vector<std::string> synthetic_class_labels(int classes);

}  // namespace wv
