#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wordvision/common.hpp"
#include "wordvision/io.hpp"
#include "wordvision/synthetic.hpp"

using namespace wv;
namespace fs = std::filesystem;

namespace {

SyntheticSpec tiny_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.classes = 4;
  spec.unit_vocab = 30;
  spec.utterances_per_class = 12;
  spec.pool_images_per_class = 10;
  spec.background_images = 8;
  spec.support_shots = 3;
  spec.test_queries_per_class = 4;
  spec.test_images_per_class = 4;
  spec.imposter_images = 6;
  spec.seed = seed;
  return spec;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("degenerate specs are rejected") {
  SyntheticSpec spec = tiny_spec(1);
  spec.unit_vocab = 3;  // fewer units than classes
  CHECK_THROWS_AS(spec.validate(), ConfigError);

  spec = tiny_spec(1);
  spec.cluster_separation = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);

  spec = tiny_spec(1);
  spec.substitution_noise = 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("noiseless plants are exact template copies") {
  TempDir dir("wv_syn_noiseless");
  SyntheticSpec spec = tiny_spec(7);
  spec.substitution_noise = 0.0;
  const SyntheticStats stats = generate_synthetic(spec, dir.path);
  CHECK(stats.corrupted_segments == 0);
  CHECK(stats.planted_segments > 0);

  // Every class's plants expand to the exact same unit sequence.
  std::ifstream plants_file(dir.path / "plants.json");
  nlohmann::json plants;
  plants_file >> plants;
  const auto corpus = read_units_jsonl(dir.path / "corpus_units.jsonl");
  std::map<std::string, std::vector<int>> word_by_class;
  for (const UnitSequence& seq : corpus) {
    const auto& info = plants.at(seq.utterance_id);
    const int begin = info.at("span").at(0).get<int>();
    const int end = info.at("span").at(1).get<int>();
    const SegmentedUtterance seg = segment_units(seq);
    REQUIRE(end <= static_cast<int>(seg.segments.size()));
    std::vector<int> word;
    for (int i = begin; i < end; ++i) {
      word.push_back(seg.segments[static_cast<std::size_t>(i)].unit_id);
    }
    const std::string label = seq.utterance_id.substr(0, seq.utterance_id.find("_utt_"));
    auto [it, inserted] = word_by_class.try_emplace(label, word);
    if (!inserted) CHECK(it->second == word);
  }
  CHECK(word_by_class.size() == 4);
}

TEST_CASE("substitution noise corrupts the expected fraction of segments") {
  TempDir dir("wv_syn_noisy");
  SyntheticSpec spec = tiny_spec(13);
  spec.utterances_per_class = 60;
  spec.substitution_noise = 0.1;
  const SyntheticStats stats = generate_synthetic(spec, dir.path);

  const double rate =
      static_cast<double>(stats.corrupted_segments) / static_cast<double>(stats.planted_segments);
  // binomial: expect 0.1 within 4 sigma over ~1300 planted segments
  const double sigma = std::sqrt(0.1 * 0.9 / static_cast<double>(stats.planted_segments));
  CHECK(std::abs(rate - 0.1) <= 4.0 * sigma);

  // recount corruptions independently from plants.json
  std::ifstream plants_file(dir.path / "plants.json");
  nlohmann::json plants;
  plants_file >> plants;
  long recount = 0;
  for (const auto& [utt, info] : plants.items()) {
    recount += info.at("corrupted").get<long>();
  }
  CHECK(recount == stats.corrupted_segments);
}

TEST_CASE("generated stores are complete and consistent") {
  TempDir dir("wv_syn_complete");
  const SyntheticSpec spec = tiny_spec(3);
  generate_synthetic(spec, dir.path);

  const SupportSet support = read_support_manifest(dir.path / "support.manifest");
  CHECK(support.ways == 4);
  CHECK(support.shots == 3);

  // every support word has units and features; every image id has a grid
  const auto words = read_word_features(dir.path / "word_feats.emb");
  for (const SupportItem& item : support.items) {
    CHECK(words.count(item.word_utterance) == 1);
    CHECK(fs::exists(dir.path / "grids" / (item.image_id + ".grd")));
  }
  const auto corpus = read_units_jsonl(dir.path / "corpus_units.jsonl");
  CHECK(corpus.size() == 4 * 12);
  for (const UnitSequence& seq : corpus) {
    CHECK(words.count(seq.utterance_id) == 1);
    for (int u : seq.units) CHECK(u < spec.unit_vocab);
    CHECK(fs::exists(dir.path / "frames" / (seq.utterance_id + ".emb")));
  }

  const auto pool = read_embedding_store(dir.path / "images.emb");
  CHECK(pool.size() == 4 * 10);
  const auto background = read_id_list(dir.path / "background.ids");
  CHECK(background.size() == 8);
  const auto gold_images = read_gold_labels(dir.path / "gold_images.json");
  for (const std::string& id : background) {
    CHECK(gold_images.at(id).empty());
  }
}

TEST_CASE("generation is deterministic") {
  TempDir a("wv_syn_det_a");
  TempDir b("wv_syn_det_b");
  generate_synthetic(tiny_spec(55), a.path);
  generate_synthetic(tiny_spec(55), b.path);

  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.path)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a.path);
    std::ifstream fa(entry.path(), std::ios::binary), fb(b.path / rel, std::ios::binary);
    REQUIRE(fb.good());
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    ++compared;
  }
  CHECK(compared > 10);
}
