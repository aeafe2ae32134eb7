#include "wordvision/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "wordvision/common.hpp"
#include "wordvision/dtw.hpp"
#include "wordvision/io.hpp"
#include "wordvision/simd.hpp"

namespace wv {

void SyntheticSpec::validate() const {
  if (classes < 1) throw ConfigError("synthetic: classes must be >= 1");
  if (unit_vocab < classes) {
    throw ConfigError("synthetic: unit vocabulary smaller than class count");
  }
  if (substitution_noise < 0.0 || substitution_noise >= 1.0) {
    throw ConfigError("synthetic: substitution noise must be in [0, 1)");
  }
  if (substitution_noise > 0.0 && unit_vocab < 4) {
    throw ConfigError("synthetic: substitution noise needs a vocabulary of at least 4");
  }
  if (cluster_separation <= 0.0) {
    throw ConfigError("synthetic: cluster separation must be positive");
  }
  if (word_len_min < 1 || word_len_max < word_len_min) {
    throw ConfigError("synthetic: bad word length range");
  }
  if (utt_len_min < 1 || utt_len_max < utt_len_min) {
    throw ConfigError("synthetic: bad utterance length range");
  }
  if (d_frame < 1 || grid_h < 1 || grid_w < 1) {
    throw ConfigError("synthetic: bad feature dimensions");
  }
  if (style_noise < 0.0 || style_dims < 0) {
    throw ConfigError("synthetic: bad style variation settings");
  }
  const int style = style_noise > 0.0 ? style_dims : 0;
  if (d_aud < classes + style) {
    throw ConfigError("synthetic: d_aud must be >= class count + style dims");
  }
  // Images need three extra directions for background/imposter content.
  if (d_img < classes + 3 + style || d_pix < classes + 3 + style) {
    throw ConfigError("synthetic: d_img and d_pix must be >= class count + 3 + style dims");
  }
  if (utterances_per_class < 1 || pool_images_per_class < 1 || background_images < 1 ||
      support_shots < 1 || test_queries_per_class < 1 || test_images_per_class < 1 ||
      imposter_images < 0) {
    throw ConfigError("synthetic: counts must be positive");
  }
}

std::vector<std::string> synthetic_class_labels(int classes) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(classes));
  int width = classes > 100 ? 3 : 2;
  for (int c = 0; c < classes; ++c) {
    std::string num = std::to_string(c);
    while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
    labels.push_back("class_" + num);
  }
  return labels;
}

namespace {

std::vector<double> gaussian_vector(int dim, double sigma, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = sigma * rng.normal();
  return v;
}

// Gram-Schmidt over seeded Gaussian draws.
std::vector<std::vector<double>> orthonormal_directions(int dim, int count, Rng& rng) {
  if (count > dim) throw ConfigError("orthonormal_directions: count exceeds dimension");
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> v = gaussian_vector(dim, 1.0, rng);
    for (const auto& d : dirs) {
      const double proj = simd::dot(v.data(), d.data(), v.size());
      simd::axpy(-proj, d.data(), v.data(), v.size());
    }
    const double norm = std::sqrt(simd::norm_sq(v.data(), v.size()));
    if (norm < 1e-8) continue;
    simd::scale(v.data(), 1.0 / norm, v.size());
    dirs.push_back(std::move(v));
  }
  return dirs;
}

std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

struct Inventories {
  std::vector<std::vector<int>> per_class;
  std::vector<int> background;
};

Inventories split_vocabulary(const SyntheticSpec& spec) {
  Inventories inv;
  const int per = std::max(1, spec.unit_vocab / (spec.classes + 1));
  inv.per_class.resize(static_cast<std::size_t>(spec.classes));
  int next = 0;
  for (int c = 0; c < spec.classes; ++c) {
    for (int k = 0; k < per && next < spec.unit_vocab; ++k) inv.per_class[c].push_back(next++);
  }
  while (next < spec.unit_vocab) inv.background.push_back(next++);
  return inv;
}

// Template: adjacent-distinct units from the class inventory.
std::vector<int> make_template(const std::vector<int>& inventory, int length, Rng& rng) {
  std::vector<int> units;
  units.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    int u;
    do {
      u = inventory[rng.below(inventory.size())];
    } while (!units.empty() && u == units.back() && inventory.size() > 1);
    units.push_back(u);
  }
  return units;
}

struct PlantedUtterance {
  std::vector<int> segment_units;  // adjacent-distinct
  int span_begin = 0;
  int span_end = 0;
  int corrupted = 0;
};

int substitute_unit(int original, int prev, int next, int vocab, Rng& rng) {
  int u;
  do {
    u = static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab)));
  } while (u == original || u == prev || u == next);
  return u;
}

PlantedUtterance plant_word(const SyntheticSpec& spec, const std::vector<int>& word_template,
                            const std::vector<int>& background_inventory, Rng& rng) {
  PlantedUtterance out;
  std::vector<int> word = word_template;
  // Substitution noise, keeping adjacency distinct so segment indices of the
  // final utterance stay exact.
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (rng.next_double() < spec.substitution_noise) {
      const int prev = i > 0 ? word[i - 1] : -1;
      const int next = i + 1 < word.size() ? word[i + 1] : -1;
      word[i] = substitute_unit(word[i], prev, next, spec.unit_vocab, rng);
      out.corrupted += 1;
    }
  }

  const int total = rng.uniform_int(spec.utt_len_min, spec.utt_len_max);
  int context = std::max(0, total - static_cast<int>(word.size()));
  if (background_inventory.empty()) context = 0;
  const int before = context > 0 ? rng.uniform_int(0, context) : 0;
  const int after = context - before;

  auto push_context = [&](std::vector<int>& units, int count, int boundary_unit) {
    for (int i = 0; i < count; ++i) {
      int u;
      do {
        u = background_inventory[rng.below(background_inventory.size())];
      } while (((!units.empty() && u == units.back()) ||
                (units.empty() && u == boundary_unit) ||
                (i == count - 1 && u == boundary_unit && units.size() + 1 ==
                                                             static_cast<std::size_t>(count))) &&
               background_inventory.size() > 1);
      units.push_back(u);
    }
  };

  std::vector<int> prefix;
  push_context(prefix, before, word.front());
  // Boundary fix: prefix must not end with the word's first unit.
  if (!prefix.empty() && prefix.back() == word.front() && background_inventory.size() > 1) {
    do {
      prefix.back() = background_inventory[rng.below(background_inventory.size())];
    } while (prefix.back() == word.front() ||
             (prefix.size() >= 2 && prefix.back() == prefix[prefix.size() - 2]));
  }

  out.segment_units = prefix;
  out.span_begin = static_cast<int>(prefix.size());
  for (int u : word) out.segment_units.push_back(u);
  out.span_end = static_cast<int>(out.segment_units.size());

  std::vector<int> suffix;
  push_context(suffix, after, word.back());
  if (!suffix.empty() && suffix.front() == word.back() && background_inventory.size() > 1) {
    do {
      suffix.front() = background_inventory[rng.below(background_inventory.size())];
    } while (suffix.front() == word.back() ||
             (suffix.size() >= 2 && suffix.front() == suffix[1]));
  }
  for (int u : suffix) out.segment_units.push_back(u);
  return out;
}

// Expand segment units to frames with random durations.
std::vector<int> expand_to_frames(const std::vector<int>& segment_units, Rng& rng,
                                  std::vector<int>* segment_starts = nullptr) {
  std::vector<int> frames;
  for (int u : segment_units) {
    if (segment_starts != nullptr) segment_starts->push_back(static_cast<int>(frames.size()));
    const int duration = rng.uniform_int(1, 3);
    for (int f = 0; f < duration; ++f) frames.push_back(u);
  }
  return frames;
}

}  // namespace

SyntheticStats generate_synthetic(const SyntheticSpec& spec,
                                  const std::filesystem::path& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir / "frames");
  fs::create_directories(out_dir / "grids");

  SyntheticStats stats;
  Rng master(mix64(spec.seed ^ 0x53594e5448ULL));
  const auto labels = synthetic_class_labels(spec.classes);
  const Inventories inv = split_vocabulary(spec);

  // Unit frame prototypes and class feature directions.
  Rng proto_rng = master.fork(1);
  std::vector<std::vector<double>> unit_protos;
  unit_protos.reserve(static_cast<std::size_t>(spec.unit_vocab));
  for (int u = 0; u < spec.unit_vocab; ++u) {
    std::vector<double> v = gaussian_vector(spec.d_frame, 1.0, proto_rng);
    const double norm = std::sqrt(simd::norm_sq(v.data(), v.size()));
    simd::scale(v.data(), 1.0 / norm, v.size());
    unit_protos.push_back(std::move(v));
  }
  Rng dir_rng = master.fork(2);
  const int style = spec.style_noise > 0.0 ? spec.style_dims : 0;
  const auto audio_dirs = orthonormal_directions(spec.d_aud, spec.classes + style, dir_rng);
  const auto image_dirs = orthonormal_directions(spec.d_img, spec.classes + 3, dir_rng);
  const auto pixel_dirs =
      orthonormal_directions(spec.d_pix, spec.classes + 3 + style, dir_rng);

  Rng template_rng = master.fork(3);
  std::vector<std::vector<int>> templates;
  templates.reserve(static_cast<std::size_t>(spec.classes));
  for (int c = 0; c < spec.classes; ++c) {
    const int length = template_rng.uniform_int(spec.word_len_min, spec.word_len_max);
    templates.push_back(
        make_template(inv.per_class[static_cast<std::size_t>(c)], length, template_rng));
  }

  auto word_feature = [&](int c, Rng& rng) {
    std::vector<double> v = gaussian_vector(spec.d_aud, spec.word_noise, rng);
    simd::axpy(1.0, audio_dirs[static_cast<std::size_t>(c)].data(), v.data(), v.size());
    for (int j = 0; j < style; ++j) {
      simd::axpy(spec.style_noise * rng.normal(),
                 audio_dirs[static_cast<std::size_t>(spec.classes + j)].data(), v.data(),
                 v.size());
    }
    return v;
  };
  // Mining compares whole-image embeddings; style variation lives only in
  // the grid representation the model consumes.
  auto image_embedding = [&](int dir_index, Rng& rng) {
    std::vector<double> v = gaussian_vector(spec.d_img, spec.image_noise, rng);
    simd::axpy(spec.cluster_separation, image_dirs[static_cast<std::size_t>(dir_index)].data(),
               v.data(), v.size());
    return v;
  };
  auto image_grid = [&](const std::string& image_id, int dir_index, Rng& rng) {
    EmbeddingGrid g;
    g.image_id = image_id;
    g.height = spec.grid_h;
    g.width = spec.grid_w;
    g.dim = spec.d_pix;
    g.data = gaussian_vector(spec.grid_h * spec.grid_w * spec.d_pix, spec.image_noise, rng);
    // one style draw per image, shared by its signal pixels
    std::vector<double> signal = pixel_dirs[static_cast<std::size_t>(dir_index)];
    simd::scale(signal.data(), spec.cluster_separation, signal.size());
    for (int j = 0; j < style; ++j) {
      simd::axpy(spec.cluster_separation * spec.style_noise * rng.normal(),
                 pixel_dirs[static_cast<std::size_t>(spec.classes + 3 + j)].data(),
                 signal.data(), signal.size());
    }
    const int signal_pixels = rng.uniform_int(1, std::min(3, g.pixels()));
    const auto positions = rng.sample_without_replacement(
        static_cast<std::size_t>(g.pixels()), static_cast<std::size_t>(signal_pixels));
    for (std::size_t hw : positions) {
      simd::axpy(1.0, signal.data(),
                 g.data.data() + hw * static_cast<std::size_t>(spec.d_pix),
                 static_cast<std::size_t>(spec.d_pix));
    }
    return g;
  };
  auto frame_features = [&](const std::string& utterance_id, const std::vector<int>& frames,
                            Rng& rng) {
    FrameFeatureSequence seq;
    seq.utterance_id = utterance_id;
    seq.dim = spec.d_frame;
    seq.data.reserve(frames.size() * static_cast<std::size_t>(spec.d_frame));
    for (int unit : frames) {
      for (int d = 0; d < spec.d_frame; ++d) {
        seq.data.push_back(unit_protos[static_cast<std::size_t>(unit)][static_cast<std::size_t>(d)] +
                           spec.frame_noise * rng.normal());
      }
    }
    return seq;
  };

  std::vector<UnitSequence> corpus_units;
  std::map<std::string, std::set<std::string>> gold_audio;
  std::map<std::string, std::set<std::string>> gold_images;
  std::vector<std::vector<double>> word_rows;
  std::vector<std::string> word_ids;
  auto add_word_feature = [&](const std::string& id, std::vector<double> v) {
    word_ids.push_back(id);
    word_rows.push_back(std::move(v));
  };

  // Mining corpus: every utterance carries one planted word.
  Rng corpus_rng = master.fork(4);
  std::map<std::string, std::array<int, 3>> plants;  // span begin/end, corrupted
  const int idx_width = 4;
  for (int c = 0; c < spec.classes; ++c) {
    for (int i = 0; i < spec.utterances_per_class; ++i) {
      const std::string utt_id = labels[static_cast<std::size_t>(c)] + "_utt_" + padded(i, idx_width);
      PlantedUtterance planted =
          plant_word(spec, templates[static_cast<std::size_t>(c)], inv.background, corpus_rng);
      stats.planted_segments += planted.span_end - planted.span_begin;
      stats.corrupted_segments += planted.corrupted;
      const std::vector<int> frames = expand_to_frames(planted.segment_units, corpus_rng);
      corpus_units.push_back({utt_id, frames, 20.0});
      save_frames(out_dir / "frames", frame_features(utt_id, frames, corpus_rng));
      gold_audio[utt_id] = {labels[static_cast<std::size_t>(c)]};
      plants[utt_id] = {planted.span_begin, planted.span_end, planted.corrupted};
      add_word_feature(utt_id, word_feature(c, corpus_rng));
    }
  }
  write_units_jsonl(out_dir / "corpus_units.jsonl", corpus_units);
  write_gold_labels(out_dir / "gold_audio.json", gold_audio);

  // Support set: clean isolated words plus support images.
  Rng support_rng = master.fork(5);
  SupportSet support;
  support.ways = spec.classes;
  support.shots = spec.support_shots;
  std::vector<UnitSequence> support_units;
  std::vector<ImageEmbedding> support_images;
  for (int c = 0; c < spec.classes; ++c) {
    for (int k = 0; k < spec.support_shots; ++k) {
      const std::string& label = labels[static_cast<std::size_t>(c)];
      const std::string word_id = label + "_support_w" + std::to_string(k);
      const std::string image_id = label + "_support_img" + std::to_string(k);
      const std::vector<int> frames =
          expand_to_frames(templates[static_cast<std::size_t>(c)], support_rng);
      support_units.push_back({word_id, frames, 20.0});
      save_frames(out_dir / "frames", frame_features(word_id, frames, support_rng));
      add_word_feature(word_id, word_feature(c, support_rng));
      support_images.push_back({image_id, image_embedding(c, support_rng)});
      write_grid_file(out_dir / "grids" / (image_id + ".grd"),
                      image_grid(image_id, c, support_rng));
      gold_images[image_id] = {label};
      support.items.push_back(
          {label, word_id, 0, static_cast<int>(templates[static_cast<std::size_t>(c)].size()),
           image_id});
    }
  }
  write_units_jsonl(out_dir / "support_units.jsonl", support_units);
  write_embedding_store(out_dir / "support_images.emb", support_images);
  support.units_file = (out_dir / "support_units.jsonl").string();
  support.images_file = (out_dir / "support_images.emb").string();
  write_support_manifest(out_dir / "support.manifest", support);

  // Unlabelled image pool for mining.
  Rng pool_rng = master.fork(6);
  std::vector<ImageEmbedding> pool;
  for (int c = 0; c < spec.classes; ++c) {
    const std::string& label = labels[static_cast<std::size_t>(c)];
    for (int i = 0; i < spec.pool_images_per_class; ++i) {
      const std::string image_id = label + "_pool_" + padded(i, idx_width);
      pool.push_back({image_id, image_embedding(c, pool_rng)});
      write_grid_file(out_dir / "grids" / (image_id + ".grd"),
                      image_grid(image_id, c, pool_rng));
      gold_images[image_id] = {label};
    }
  }
  write_embedding_store(out_dir / "images.emb", pool);

  // Background images: content drawn from the extra non-class directions.
  Rng bg_rng = master.fork(7);
  std::vector<std::string> background_ids;
  for (int i = 0; i < spec.background_images; ++i) {
    const std::string image_id = "bg_" + padded(i, idx_width);
    const int dir = spec.classes + static_cast<int>(bg_rng.below(3));
    write_grid_file(out_dir / "grids" / (image_id + ".grd"),
                    image_grid(image_id, dir, bg_rng));
    gold_images[image_id] = {};
    background_ids.push_back(image_id);
  }
  write_id_list(out_dir / "background.ids", background_ids);

  // Episodic test set and retrieval pool.
  Rng test_rng = master.fork(8);
  TestManifest test;
  test.word_feats = out_dir / "word_feats.emb";
  test.grids_dir = out_dir / "grids";
  PoolManifest retrieval;
  retrieval.word_feats = out_dir / "word_feats.emb";
  retrieval.grids_dir = out_dir / "grids";
  for (int c = 0; c < spec.classes; ++c) {
    const std::string& label = labels[static_cast<std::size_t>(c)];
    for (int i = 0; i < spec.test_queries_per_class; ++i) {
      const std::string word_id = label + "_q_" + padded(i, idx_width);
      add_word_feature(word_id, word_feature(c, test_rng));
      test.queries.push_back({word_id, label});
      retrieval.query_candidates[label].push_back(word_id);
    }
    for (int i = 0; i < spec.test_images_per_class; ++i) {
      const std::string image_id = label + "_timg_" + padded(i, idx_width);
      write_grid_file(out_dir / "grids" / (image_id + ".grd"),
                      image_grid(image_id, c, test_rng));
      gold_images[image_id] = {label};
      test.images.push_back({image_id, label});
      retrieval.images.push_back({image_id, {label}});
    }
  }
  for (int i = 0; i < spec.imposter_images; ++i) {
    const std::string image_id = "imposter_" + padded(i, idx_width);
    const int dir = spec.classes + static_cast<int>(test_rng.below(3));
    write_grid_file(out_dir / "grids" / (image_id + ".grd"),
                    image_grid(image_id, dir, test_rng));
    gold_images[image_id] = {};
    retrieval.images.push_back({image_id, {}});
  }
  write_test_manifest(out_dir / "test.manifest", test);
  write_pool_manifest(out_dir / "pool.manifest", retrieval);
  write_gold_labels(out_dir / "gold_images.json", gold_images);

  write_embedding_file(out_dir / "word_feats.emb", word_rows);
  write_id_sidecar(out_dir / "word_feats.emb", word_ids);

  // Plant bookkeeping for noise checks.
  {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [utt, info] : plants) {
      j[utt] = {{"span", {info[0], info[1]}}, {"corrupted", info[2]}};
    }
    std::ofstream os(out_dir / "plants.json");
    if (!os) throw Error("cannot write plants.json");
    os << j.dump(2) << '\n';
  }

  return stats;
}

}  // namespace wv
