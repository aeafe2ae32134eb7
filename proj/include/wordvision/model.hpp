#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wordvision/embeddings.hpp"
#include "wordvision/pairs.hpp"

namespace wv {

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Fixed-dimension acoustic feature for one isolated word.
struct WordFeature {
  std::string word_id;
  std::string class_label;
  std::vector<double> vector;
};

// One linear projection per modality into the shared embedding space.
struct ModelParams {
  int d_aud = 0;
  int d_pix = 0;
  int d_emb = 0;
  Matrix w_audio;                // d_emb x d_aud
  std::vector<double> b_audio;   // d_emb
  Matrix w_vision;               // d_emb x d_pix
  std::vector<double> b_vision;  // d_emb

  static ModelParams zeros(int d_aud, int d_pix, int d_emb);
  static ModelParams random_init(int d_aud, int d_pix, int d_emb, std::uint64_t seed,
                                 double stddev = 0.2);

  std::size_t parameter_count() const;
  // Flat view in (w_audio, b_audio, w_vision, b_vision) order; used by the
  // optimizer and by finite-difference checks.
  double& flat(std::size_t i);
  double flat(std::size_t i) const;
};

struct AttentionOutput {
  int height = 0;
  int width = 0;
  std::vector<double> weights;  // h*w attention values in [-1, 1]
  int argmax_h = 0;
  int argmax_w = 0;
  double score = 0.0;  // S in [0, 100]
};

// Projects the word and every pixel into the shared space (L2-normalized),
// takes dot products as attention weights, and maps the max from [-1, 1] to
// [0, 100]. Argmax ties resolve to the first pixel in row-major order.
AttentionOutput attend(const ModelParams& params, std::span<const double> word,
                       const EmbeddingGrid& grid);

// The similarity score S alone.
double similarity(const ModelParams& params, std::span<const double> word,
                  const EmbeddingGrid& grid);

// The normalized audio embedding of one word.
std::vector<double> project_word_embedding(const ModelParams& params,
                                           std::span<const double> word);

// S for a precomputed unit-norm audio embedding.
double similarity_from_embedding(const ModelParams& params,
                                 std::span<const double> audio_embedding,
                                 const EmbeddingGrid& grid);

// Distance form used by the evaluation protocols.
inline double score_distance(double s) { return 100.0 - s; }

// Feature-level view of one training bundle. Pointers refer into a
// FeatureStore and must outlive the call.
struct FeatureBundle {
  const std::vector<double>* anchor_word = nullptr;
  const EmbeddingGrid* anchor_grid = nullptr;
  std::vector<const std::vector<double>*> positive_words;
  std::vector<const EmbeddingGrid*> positive_grids;
  std::vector<const std::vector<double>*> negative_words;
  std::vector<const EmbeddingGrid*> negative_grids;
  std::vector<const EmbeddingGrid*> background_grids;

  void validate() const;
};

// Contrastive objective: the anchor score is pulled to 100, positive-pair
// scores to 100, negative and background scores to 0. Each bracketed group
// contributes the mean of its squared deviations.
double loss(const ModelParams& params, const FeatureBundle& bundle);

// Analytic gradient; the max over pixels is differentiated through the
// argmax pixel. Returns the loss value.
double loss_gradient(const ModelParams& params, const FeatureBundle& bundle,
                     ModelParams& grad);

// In-memory feature lookup backing training and evaluation.
struct FeatureStore {
  std::map<std::string, std::vector<double>> words;
  std::map<std::string, EmbeddingGrid> grids;

  const std::vector<double>& word(const std::string& id) const;
  const EmbeddingGrid& grid(const std::string& id) const;
};

FeatureBundle resolve_bundle(const SampledBundle& bundle, const FeatureStore& store);

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 100;
  int n_pos = 5;
  int n_neg = 11;
  int patience = 10;
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;  // best-validation parameters
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
  bool early_stopped = false;
};

// Adam (beta1=0.9, beta2=0.999, eps=1e-8) over per-bundle steps; one epoch
// visits every train pair as anchor in a seeded shuffled order. Validation
// triplet accuracy drives early stopping.
TrainResult train(const ModelParams& init, const MinedPairSet& pairs,
                  const FeatureStore& store, const TrainConfig& config);

// Fraction of triplets whose positive image scores strictly higher than the
// negative image; ties count as failures.
double validate_triplets(const ModelParams& params,
                         const std::vector<ValidationTriplet>& dev,
                         const FeatureStore& store);

// --- checkpoint format ("MAT1") --------------------------------------------
// magic "MAT1", u32 LE d_aud, d_pix, d_emb, then w_audio, b_audio, w_vision,
// b_vision as float32 LE row-major.

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace wv
