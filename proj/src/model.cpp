#include "wordvision/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>

#include "wordvision/common.hpp"
#include "wordvision/simd.hpp"

namespace wv {

ModelParams ModelParams::zeros(int d_aud, int d_pix, int d_emb) {
  if (d_aud < 1 || d_pix < 1 || d_emb < 1) {
    throw ConfigError("ModelParams: dimensions must be >= 1");
  }
  ModelParams p;
  p.d_aud = d_aud;
  p.d_pix = d_pix;
  p.d_emb = d_emb;
  p.w_audio = Matrix(d_emb, d_aud);
  p.b_audio.assign(static_cast<std::size_t>(d_emb), 0.0);
  p.w_vision = Matrix(d_emb, d_pix);
  p.b_vision.assign(static_cast<std::size_t>(d_emb), 0.0);
  return p;
}

ModelParams ModelParams::random_init(int d_aud, int d_pix, int d_emb, std::uint64_t seed,
                                     double stddev) {
  ModelParams p = zeros(d_aud, d_pix, d_emb);
  Rng rng(seed);
  for (double& v : p.w_audio.data) v = stddev * rng.normal();
  for (double& v : p.w_vision.data) v = stddev * rng.normal();
  return p;
}

std::size_t ModelParams::parameter_count() const {
  return w_audio.data.size() + b_audio.size() + w_vision.data.size() + b_vision.size();
}

double& ModelParams::flat(std::size_t i) {
  if (i < w_audio.data.size()) return w_audio.data[i];
  i -= w_audio.data.size();
  if (i < b_audio.size()) return b_audio[i];
  i -= b_audio.size();
  if (i < w_vision.data.size()) return w_vision.data[i];
  i -= w_vision.data.size();
  return b_vision[i];
}

double ModelParams::flat(std::size_t i) const {
  return const_cast<ModelParams*>(this)->flat(i);
}

namespace {

constexpr double kNormFloor = 1e-300;

// y = normalize(W x + b); returns ||W x + b||.
double project(const Matrix& w, const std::vector<double>& b, std::span<const double> x,
               double* y) {
  simd::matvec(w.data.data(), static_cast<std::size_t>(w.rows),
               static_cast<std::size_t>(w.cols), x.data(), y);
  simd::axpy(1.0, b.data(), y, b.size());
  const double norm = std::sqrt(simd::norm_sq(y, b.size()));
  if (norm < kNormFloor) {
    throw ZeroVector("projection has zero norm");
  }
  simd::scale(y, 1.0 / norm, b.size());
  return norm;
}

struct ProjectedWord {
  std::span<const double> input;
  std::vector<double> y;      // normalized embedding
  double norm = 0.0;          // pre-normalization norm
  std::vector<double> grad_y; // accumulated dL/dy
};

struct ProjectedGrid {
  const EmbeddingGrid* grid = nullptr;
  Matrix y;                   // pixels x d_emb, normalized
  std::vector<double> norms;  // per pixel
  Matrix grad_y;              // pixels x d_emb
};

ProjectedWord project_word(const ModelParams& p, std::span<const double> x, bool with_grad) {
  if (static_cast<int>(x.size()) != p.d_aud) {
    throw DimensionMismatch("attend: word feature dimension " + std::to_string(x.size()) +
                            " != d_aud " + std::to_string(p.d_aud));
  }
  ProjectedWord out;
  out.input = x;
  out.y.resize(static_cast<std::size_t>(p.d_emb));
  out.norm = project(p.w_audio, p.b_audio, x, out.y.data());
  if (with_grad) out.grad_y.assign(static_cast<std::size_t>(p.d_emb), 0.0);
  return out;
}

ProjectedGrid project_grid(const ModelParams& p, const EmbeddingGrid& g, bool with_grad) {
  if (g.dim != p.d_pix) {
    throw DimensionMismatch("attend: grid " + g.image_id + " channel dimension " +
                            std::to_string(g.dim) + " != d_pix " + std::to_string(p.d_pix));
  }
  if (g.height < 1 || g.width < 1) {
    throw EmptyInput("attend: empty grid " + g.image_id);
  }
  ProjectedGrid out;
  out.grid = &g;
  const int pixels = g.pixels();
  out.y = Matrix(pixels, p.d_emb);
  out.norms.resize(static_cast<std::size_t>(pixels));
  for (int hw = 0; hw < pixels; ++hw) {
    out.norms[static_cast<std::size_t>(hw)] =
        project(p.w_vision, p.b_vision, g.pixel_flat(hw), out.y.row(hw));
  }
  if (with_grad) out.grad_y = Matrix(pixels, p.d_emb);
  return out;
}

struct ScoredPair {
  int word = 0;
  int grid = 0;
  int argmax_pixel = 0;
  double s = 0.0;
};

ScoredPair score_pair(const std::vector<ProjectedWord>& words,
                      const std::vector<ProjectedGrid>& grids, int w, int g) {
  const ProjectedWord& pw = words[static_cast<std::size_t>(w)];
  const ProjectedGrid& pg = grids[static_cast<std::size_t>(g)];
  const int pixels = pg.y.rows;
  double best = -2.0;
  int best_hw = 0;
  for (int hw = 0; hw < pixels; ++hw) {
    const double a = simd::dot(pw.y.data(), pg.y.row(hw), pw.y.size());
    if (a > best) {
      best = a;
      best_hw = hw;
    }
  }
  return {w, g, best_hw, (best + 1.0) * 50.0};
}

// dL/du from dL/dy through y = u / ||u||.
void backprop_normalize(const double* grad_y, const double* y, double norm, std::size_t n,
                        double* grad_u) {
  const double gy_dot_y = simd::dot(grad_y, y, n);
  for (std::size_t i = 0; i < n; ++i) {
    grad_u[i] = (grad_y[i] - gy_dot_y * y[i]) / norm;
  }
}

// Forward pass over every score the bundle needs; optional backward pass
// accumulating into grad. Projections of repeated items (the anchor word
// appears in every term) are computed once.
double evaluate_bundle(const ModelParams& p, const FeatureBundle& b, ModelParams* grad) {
  b.validate();
  const bool with_grad = grad != nullptr;
  const std::size_t n_pos = b.positive_words.size();
  const std::size_t n_neg = b.negative_words.size();

  std::vector<ProjectedWord> words;
  words.reserve(1 + n_pos + n_neg);
  words.push_back(project_word(p, *b.anchor_word, with_grad));
  for (const auto* w : b.positive_words) words.push_back(project_word(p, *w, with_grad));
  for (const auto* w : b.negative_words) words.push_back(project_word(p, *w, with_grad));
  const int pos_word0 = 1;
  const int neg_word0 = 1 + static_cast<int>(n_pos);

  std::vector<ProjectedGrid> grids;
  grids.reserve(1 + n_pos + 2 * n_neg);
  grids.push_back(project_grid(p, *b.anchor_grid, with_grad));
  for (const auto* g : b.positive_grids) grids.push_back(project_grid(p, *g, with_grad));
  for (const auto* g : b.negative_grids) grids.push_back(project_grid(p, *g, with_grad));
  for (const auto* g : b.background_grids) grids.push_back(project_grid(p, *g, with_grad));
  const int pos_grid0 = 1;
  const int neg_grid0 = 1 + static_cast<int>(n_pos);
  const int bg_grid0 = neg_grid0 + static_cast<int>(n_neg);

  // (pair, target, weight): each score contributes weight * (s - target)^2.
  std::vector<std::tuple<ScoredPair, double, double>> terms;
  terms.reserve(1 + 3 * n_neg + 2 * n_pos);
  terms.emplace_back(score_pair(words, grids, 0, 0), 100.0, 1.0);
  for (std::size_t i = 0; i < n_neg; ++i) {
    terms.emplace_back(score_pair(words, grids, neg_word0 + static_cast<int>(i), 0), 0.0,
                       1.0 / 3.0);
    terms.emplace_back(score_pair(words, grids, 0, neg_grid0 + static_cast<int>(i)), 0.0,
                       1.0 / 3.0);
    terms.emplace_back(score_pair(words, grids, 0, bg_grid0 + static_cast<int>(i)), 0.0,
                       1.0 / 3.0);
  }
  for (std::size_t i = 0; i < n_pos; ++i) {
    terms.emplace_back(score_pair(words, grids, 0, pos_grid0 + static_cast<int>(i)), 100.0,
                       1.0 / 2.0);
    terms.emplace_back(score_pair(words, grids, pos_word0 + static_cast<int>(i), 0), 100.0,
                       1.0 / 2.0);
  }

  double total = 0.0;
  for (const auto& [pair, target, weight] : terms) {
    const double diff = pair.s - target;
    total += weight * diff * diff;
  }
  if (!with_grad) return total;

  // Backward: dL/dS routes 50 * dL/dS into the word embedding and the argmax
  // pixel embedding of each scored pair.
  for (const auto& [pair, target, weight] : terms) {
    const double dl_ds = 2.0 * weight * (pair.s - target);
    ProjectedWord& pw = words[static_cast<std::size_t>(pair.word)];
    ProjectedGrid& pg = grids[static_cast<std::size_t>(pair.grid)];
    const double f = 50.0 * dl_ds;
    simd::axpy(f, pg.y.row(pair.argmax_pixel), pw.grad_y.data(), pw.grad_y.size());
    simd::axpy(f, pw.y.data(), pg.grad_y.row(pair.argmax_pixel), pw.y.size());
  }

  std::vector<double> grad_u(static_cast<std::size_t>(p.d_emb));
  for (const ProjectedWord& pw : words) {
    backprop_normalize(pw.grad_y.data(), pw.y.data(), pw.norm, grad_u.size(), grad_u.data());
    simd::rank1_update(1.0, grad_u.data(), grad_u.size(), pw.input.data(),
                       static_cast<std::size_t>(p.d_aud), grad->w_audio.data.data());
    simd::axpy(1.0, grad_u.data(), grad->b_audio.data(), grad_u.size());
  }
  for (const ProjectedGrid& pg : grids) {
    for (int hw = 0; hw < pg.y.rows; ++hw) {
      // Only pixels that won an argmax carry gradient.
      if (simd::norm_sq(pg.grad_y.row(hw), grad_u.size()) == 0.0) continue;
      backprop_normalize(pg.grad_y.row(hw), pg.y.row(hw), pg.norms[static_cast<std::size_t>(hw)],
                         grad_u.size(), grad_u.data());
      simd::rank1_update(1.0, grad_u.data(), grad_u.size(), pg.grid->pixel_flat(hw).data(),
                         static_cast<std::size_t>(p.d_pix), grad->w_vision.data.data());
      simd::axpy(1.0, grad_u.data(), grad->b_vision.data(), grad_u.size());
    }
  }
  return total;
}

}  // namespace

AttentionOutput attend(const ModelParams& params, std::span<const double> word,
                       const EmbeddingGrid& grid) {
  ProjectedWord pw = project_word(params, word, false);
  ProjectedGrid pg = project_grid(params, grid, false);
  AttentionOutput out;
  out.height = grid.height;
  out.width = grid.width;
  out.weights.resize(static_cast<std::size_t>(grid.pixels()));
  double best = -2.0;
  int best_hw = 0;
  for (int hw = 0; hw < grid.pixels(); ++hw) {
    const double a = simd::dot(pw.y.data(), pg.y.row(hw), pw.y.size());
    out.weights[static_cast<std::size_t>(hw)] = a;
    if (a > best) {
      best = a;
      best_hw = hw;
    }
  }
  out.argmax_h = best_hw / grid.width;
  out.argmax_w = best_hw % grid.width;
  out.score = (best + 1.0) * 50.0;
  return out;
}

double similarity(const ModelParams& params, std::span<const double> word,
                  const EmbeddingGrid& grid) {
  return attend(params, word, grid).score;
}

std::vector<double> project_word_embedding(const ModelParams& params,
                                           std::span<const double> word) {
  return project_word(params, word, false).y;
}

double similarity_from_embedding(const ModelParams& params,
                                 std::span<const double> audio_embedding,
                                 const EmbeddingGrid& grid) {
  if (static_cast<int>(audio_embedding.size()) != params.d_emb) {
    throw DimensionMismatch("similarity_from_embedding: embedding dimension mismatch");
  }
  ProjectedGrid pg = project_grid(params, grid, false);
  double best = -2.0;
  for (int hw = 0; hw < pg.y.rows; ++hw) {
    best = std::max(best, simd::dot(audio_embedding.data(), pg.y.row(hw),
                                    audio_embedding.size()));
  }
  return (best + 1.0) * 50.0;
}

void FeatureBundle::validate() const {
  if (anchor_word == nullptr || anchor_grid == nullptr) {
    throw EmptyInput("bundle has no anchor");
  }
  if (positive_words.size() != positive_grids.size()) {
    throw DimensionMismatch("bundle positive word/grid counts differ");
  }
  if (negative_words.size() != negative_grids.size() ||
      negative_words.size() != background_grids.size()) {
    throw DimensionMismatch("bundle negative word/grid/background counts differ");
  }
}

double loss(const ModelParams& params, const FeatureBundle& bundle) {
  return evaluate_bundle(params, bundle, nullptr);
}

double loss_gradient(const ModelParams& params, const FeatureBundle& bundle,
                     ModelParams& grad) {
  grad = ModelParams::zeros(params.d_aud, params.d_pix, params.d_emb);
  return evaluate_bundle(params, bundle, &grad);
}

const std::vector<double>& FeatureStore::word(const std::string& id) const {
  auto it = words.find(id);
  if (it == words.end()) throw Error("feature store: unknown word id " + id);
  return it->second;
}

const EmbeddingGrid& FeatureStore::grid(const std::string& id) const {
  auto it = grids.find(id);
  if (it == grids.end()) throw Error("feature store: unknown image id " + id);
  return it->second;
}

FeatureBundle resolve_bundle(const SampledBundle& bundle, const FeatureStore& store) {
  FeatureBundle fb;
  fb.anchor_word = &store.word(bundle.anchor.word_id);
  fb.anchor_grid = &store.grid(bundle.anchor.image_id);
  for (const MinedPair& p : bundle.positives) {
    fb.positive_words.push_back(&store.word(p.word_id));
    fb.positive_grids.push_back(&store.grid(p.image_id));
  }
  for (const MinedPair& p : bundle.negatives) {
    fb.negative_words.push_back(&store.word(p.word_id));
    fb.negative_grids.push_back(&store.grid(p.image_id));
  }
  for (const std::string& id : bundle.background_images) {
    fb.background_grids.push_back(&store.grid(id));
  }
  return fb;
}

namespace {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(ModelParams& params, const ModelParams& grad, AdamState& state, double lr) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  const std::size_t n = params.parameter_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad.flat(i);
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params.flat(i) -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace

TrainResult train(const ModelParams& init, const MinedPairSet& pairs,
                  const FeatureStore& store, const TrainConfig& config) {
  if (config.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (config.patience < 1) throw ConfigError("train: patience must be >= 1");

  // Anchor schedule: every train pair of every class.
  std::vector<std::pair<std::string, std::size_t>> anchors;
  for (const std::string& label : pairs.class_labels()) {
    const std::size_t count = pairs.split_pairs(label, Split::Train).size();
    for (std::size_t i = 0; i < count; ++i) anchors.push_back({label, i});
  }
  if (anchors.empty()) throw EmptyInput("train: no training pairs");

  const auto dev = make_validation_triplets(pairs, mix64(config.seed ^ 0x76616c69dULL));

  TrainResult result;
  result.params = init;
  ModelParams current = init;
  ModelParams grad;
  AdamState adam(init.parameter_count());
  Rng epoch_rng(mix64(config.seed ^ 0x45504f43ULL));
  bool warned_replacement = false;
  int epochs_without_improvement = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(anchors.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    epoch_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const auto& [label, anchor_index] = anchors[order[step]];
      const std::uint64_t step_seed =
          mix64(config.seed ^ mix64(static_cast<std::uint64_t>(epoch) * 1000003ULL +
                                    static_cast<std::uint64_t>(step)));
      SampledBundle sampled;
      try {
        sampled = sample_bundle(pairs, label, anchor_index, config.n_pos, config.n_neg,
                                step_seed);
      } catch (const InsufficientPool& e) {
        throw InsufficientPool("epoch " + std::to_string(epoch) + " step " +
                               std::to_string(step) + ": " + e.what());
      }
      if (sampled.positives_with_replacement && !warned_replacement) {
        warned_replacement = true;
        std::cerr << "train: class " << label << " has fewer than " << config.n_pos
                  << " positive pairs; sampling with replacement\n";
      }
      const FeatureBundle fb = resolve_bundle(sampled, store);
      epoch_loss += loss_gradient(current, fb, grad);
      adam_step(current, grad, adam, config.lr);
    }
    epoch_loss /= static_cast<double>(order.size());

    const double val_acc = validate_triplets(current, dev, store);
    result.history.push_back({epoch, epoch_loss, val_acc});
    if (config.verbose) {
      std::cerr << "epoch " << epoch << " loss " << epoch_loss << " val " << val_acc << "\n";
    }

    // Ties refresh the kept parameters (later epochs have seen more steps)
    // but only strict improvements reset the patience counter.
    if (result.best_epoch < 0 || val_acc >= result.best_val_accuracy) {
      const bool strict = result.best_epoch < 0 || val_acc > result.best_val_accuracy;
      result.best_epoch = epoch;
      result.best_val_accuracy = val_acc;
      result.params = current;
      if (strict) {
        epochs_without_improvement = 0;
        continue;
      }
    }
    epochs_without_improvement += 1;
    if (epochs_without_improvement >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

double validate_triplets(const ModelParams& params,
                         const std::vector<ValidationTriplet>& dev,
                         const FeatureStore& store) {
  if (dev.empty()) throw EmptyInput("validate_triplets: empty dev set");
  std::vector<int> wins(dev.size(), 0);
  parallel_for(dev.size(), [&](std::size_t i) {
    const ValidationTriplet& t = dev[i];
    const auto& word = store.word(t.word_id);
    const double pos = similarity(params, word, store.grid(t.positive_image_id));
    const double neg = similarity(params, word, store.grid(t.negative_image_id));
    wins[i] = pos > neg ? 1 : 0;
  });
  long total = 0;
  for (int w : wins) total += w;
  return static_cast<double>(total) / static_cast<double>(dev.size());
}

// --- checkpoint I/O ---------------------------------------------------------

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  if (!is) throw Error("checkpoint: truncated header");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_block(std::ostream& os, const std::vector<double>& values) {
  for (double v : values) put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void get_block(std::istream& is, std::vector<double>& values) {
  for (double& v : values) v = static_cast<double>(std::bit_cast<float>(get_u32(is)));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write checkpoint " + path.string());
  os.write("MAT1", 4);
  put_u32(os, static_cast<std::uint32_t>(params.d_aud));
  put_u32(os, static_cast<std::uint32_t>(params.d_pix));
  put_u32(os, static_cast<std::uint32_t>(params.d_emb));
  put_block(os, params.w_audio.data);
  put_block(os, params.b_audio);
  put_block(os, params.w_vision.data);
  put_block(os, params.b_vision);
  if (!os) throw Error("short write to checkpoint " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "MAT1") {
    throw Error("bad checkpoint magic in " + path.string());
  }
  const int d_aud = static_cast<int>(get_u32(is));
  const int d_pix = static_cast<int>(get_u32(is));
  const int d_emb = static_cast<int>(get_u32(is));
  ModelParams params = ModelParams::zeros(d_aud, d_pix, d_emb);
  get_block(is, params.w_audio.data);
  get_block(is, params.b_audio);
  get_block(is, params.w_vision.data);
  get_block(is, params.b_vision);
  if (!is) throw Error("truncated checkpoint " + path.string());
  return params;
}

}  // namespace wv
