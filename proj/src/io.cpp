#include "wordvision/io.hpp"

#include <fstream>

#include <json.hpp>

#include "wordvision/common.hpp"
#include "wordvision/dtw.hpp"

namespace wv {

using nlohmann::json;

namespace {

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::filesystem::path sibling(const std::filesystem::path& manifest, const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : manifest.parent_path() / p;
}

}  // namespace

std::vector<UnitSequence> read_units_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::vector<UnitSequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    UnitSequence seq;
    seq.utterance_id = j.at("utterance_id").get<std::string>();
    seq.units = j.at("units").get<std::vector<int>>();
    seq.frame_duration_ms = j.value("frame_duration_ms", 20.0);
    for (int u : seq.units) {
      if (u < 0) {
        throw Error(path.string() + ": negative unit id in " + seq.utterance_id);
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

void write_units_jsonl(const std::filesystem::path& path,
                       const std::vector<UnitSequence>& sequences) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  for (const UnitSequence& seq : sequences) {
    json j{{"utterance_id", seq.utterance_id},
           {"units", seq.units},
           {"frame_duration_ms", seq.frame_duration_ms}};
    os << j.dump() << '\n';
  }
}

std::vector<SegmentedUtterance> read_segments_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::vector<SegmentedUtterance> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    SegmentedUtterance seg;
    seg.utterance_id = j.at("utterance_id").get<std::string>();
    for (const auto& s : j.at("segments")) {
      seg.segments.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>()});
    }
    out.push_back(std::move(seg));
  }
  return out;
}

void write_segments_jsonl(const std::filesystem::path& path,
                          const std::vector<SegmentedUtterance>& utterances) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  for (const SegmentedUtterance& seg : utterances) {
    json segments = json::array();
    for (const Segment& s : seg.segments) {
      segments.push_back({s.unit_id, s.start_frame, s.end_frame});
    }
    json j{{"utterance_id", seg.utterance_id}, {"segments", segments}};
    os << j.dump() << '\n';
  }
}

std::vector<SegmentedUtterance> load_corpus(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::string first_line;
  while (std::getline(is, first_line) && first_line.empty()) {
  }
  if (first_line.empty()) throw EmptyInput("empty corpus file " + path.string());
  const json probe = json::parse(first_line);
  if (probe.contains("segments")) return read_segments_jsonl(path);

  std::vector<SegmentedUtterance> out;
  for (const UnitSequence& seq : read_units_jsonl(path)) {
    out.push_back(segment_units(seq));
  }
  return out;
}

SupportSet read_support_manifest(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  SupportSet s;
  s.ways = j.at("ways").get<int>();
  s.shots = j.at("shots").get<int>();
  if (j.contains("units_file")) {
    s.units_file = sibling(path, j.at("units_file").get<std::string>()).string();
  }
  if (j.contains("images_file")) {
    s.images_file = sibling(path, j.at("images_file").get<std::string>()).string();
  }
  for (const auto& item : j.at("items")) {
    SupportItem si;
    si.class_label = item.at("class").get<std::string>();
    si.word_utterance = item.at("word_utterance").get<std::string>();
    si.span_begin = item.at("word_span").at(0).get<int>();
    si.span_end = item.at("word_span").at(1).get<int>();
    si.image_id = item.at("image_id").get<std::string>();
    s.items.push_back(std::move(si));
  }
  s.validate();
  return s;
}

void write_support_manifest(const std::filesystem::path& path, const SupportSet& support) {
  json items = json::array();
  for (const SupportItem& si : support.items) {
    items.push_back({{"class", si.class_label},
                     {"word_utterance", si.word_utterance},
                     {"word_span", {si.span_begin, si.span_end}},
                     {"image_id", si.image_id}});
  }
  json j{{"ways", support.ways}, {"shots", support.shots}, {"items", items}};
  if (!support.units_file.empty()) {
    j["units_file"] = std::filesystem::path(support.units_file).filename().string();
  }
  if (!support.images_file.empty()) {
    j["images_file"] = std::filesystem::path(support.images_file).filename().string();
  }
  write_json_file(path, j);
}

std::vector<MinedWord> read_mined_words(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  std::vector<MinedWord> out;
  for (const auto& item : j) {
    out.push_back({item.at("utterance_id").get<std::string>(),
                   item.at("class_label").get<std::string>(),
                   item.at("span").at(0).get<int>(), item.at("span").at(1).get<int>(),
                   item.at("score").get<double>()});
  }
  return out;
}

void write_mined_words(const std::filesystem::path& path,
                       const std::vector<MinedWord>& words) {
  json j = json::array();
  for (const MinedWord& w : words) {
    j.push_back({{"utterance_id", w.utterance_id},
                 {"class_label", w.class_label},
                 {"span", {w.span_begin, w.span_end}},
                 {"score", w.score}});
  }
  write_json_file(path, j);
}

std::vector<ImageRanking> read_image_rankings(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  std::vector<ImageRanking> out;
  for (const auto& r : j) {
    ImageRanking ranking;
    ranking.class_label = r.at("class_label").get<std::string>();
    for (const auto& e : r.at("entries")) {
      ranking.entries.push_back(
          {e.at("image_id").get<std::string>(), e.at("similarity").get<double>()});
    }
    out.push_back(std::move(ranking));
  }
  return out;
}

void write_image_rankings(const std::filesystem::path& path,
                          const std::vector<ImageRanking>& rankings) {
  json j = json::array();
  for (const ImageRanking& r : rankings) {
    json entries = json::array();
    for (const ImageRankingEntry& e : r.entries) {
      entries.push_back({{"image_id", e.image_id}, {"similarity", e.similarity}});
    }
    j.push_back({{"class_label", r.class_label}, {"entries", entries}});
  }
  write_json_file(path, j);
}

MinedPairSet read_pair_set(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  MinedPairSet out;
  for (const auto& [label, pairs] : j.at("classes").items()) {
    std::vector<MinedPair> class_pairs;
    for (const auto& p : pairs) {
      MinedPair mp;
      mp.word_id = p.at("word_id").get<std::string>();
      mp.image_id = p.at("image_id").get<std::string>();
      mp.word_span_begin = p.at("word_span").at(0).get<int>();
      mp.word_span_end = p.at("word_span").at(1).get<int>();
      mp.split = p.at("split").get<std::string>() == "validation" ? Split::Validation
                                                                  : Split::Train;
      class_pairs.push_back(std::move(mp));
    }
    out.pairs_by_class[label] = std::move(class_pairs);
  }
  out.background_image_ids =
      j.at("background_image_ids").get<std::vector<std::string>>();
  out.validate();
  return out;
}

void write_pair_set(const std::filesystem::path& path, const MinedPairSet& pairs) {
  json classes = json::object();
  for (const auto& [label, class_pairs] : pairs.pairs_by_class) {
    json arr = json::array();
    for (const MinedPair& p : class_pairs) {
      arr.push_back({{"word_id", p.word_id},
                     {"image_id", p.image_id},
                     {"word_span", {p.word_span_begin, p.word_span_end}},
                     {"split", p.split == Split::Validation ? "validation" : "train"}});
    }
    classes[label] = std::move(arr);
  }
  json j{{"classes", classes}, {"background_image_ids", pairs.background_image_ids}};
  write_json_file(path, j);
}

std::map<std::string, std::set<std::string>> read_gold_labels(
    const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [id, labels] : j.items()) {
    std::set<std::string> s;
    for (const auto& label : labels) s.insert(label.get<std::string>());
    out[id] = std::move(s);
  }
  return out;
}

void write_gold_labels(const std::filesystem::path& path,
                       const std::map<std::string, std::set<std::string>>& gold) {
  json j = json::object();
  for (const auto& [id, labels] : gold) {
    j[id] = std::vector<std::string>(labels.begin(), labels.end());
  }
  write_json_file(path, j);
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

void write_id_list(const std::filesystem::path& path, const std::vector<std::string>& ids) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  for (const auto& id : ids) os << id << '\n';
}

std::map<std::string, std::vector<double>> read_word_features(
    const std::filesystem::path& emb_path) {
  auto rows = read_embedding_file(emb_path);
  auto ids = read_id_sidecar(emb_path);
  if (rows.size() != ids.size()) {
    throw Error("word features " + emb_path.string() + ": row/id count mismatch");
  }
  std::map<std::string, std::vector<double>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) out[ids[i]] = std::move(rows[i]);
  return out;
}

TestManifest read_test_manifest(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  TestManifest m;
  m.word_feats = sibling(path, j.at("word_feats").get<std::string>());
  m.grids_dir = sibling(path, j.at("grids_dir").get<std::string>());
  for (const auto& q : j.at("queries")) {
    m.queries.push_back({q.at("id").get<std::string>(), q.at("class").get<std::string>()});
  }
  for (const auto& im : j.at("images")) {
    m.images.push_back({im.at("id").get<std::string>(), im.at("class").get<std::string>()});
  }
  return m;
}

void write_test_manifest(const std::filesystem::path& path, const TestManifest& manifest) {
  json queries = json::array();
  for (const auto& [id, label] : manifest.queries) {
    queries.push_back({{"id", id}, {"class", label}});
  }
  json images = json::array();
  for (const auto& [id, label] : manifest.images) {
    images.push_back({{"id", id}, {"class", label}});
  }
  json j{{"word_feats", manifest.word_feats.filename().string()},
         {"grids_dir", manifest.grids_dir.filename().string()},
         {"queries", queries},
         {"images", images}};
  write_json_file(path, j);
}

PoolManifest read_pool_manifest(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  PoolManifest m;
  m.word_feats = sibling(path, j.at("word_feats").get<std::string>());
  m.grids_dir = sibling(path, j.at("grids_dir").get<std::string>());
  for (const auto& im : j.at("images")) {
    std::set<std::string> gold;
    for (const auto& g : im.at("gold")) gold.insert(g.get<std::string>());
    m.images.push_back({im.at("id").get<std::string>(), std::move(gold)});
  }
  for (const auto& [label, ids] : j.at("query_candidates").items()) {
    m.query_candidates[label] = ids.get<std::vector<std::string>>();
  }
  return m;
}

void write_pool_manifest(const std::filesystem::path& path, const PoolManifest& manifest) {
  json images = json::array();
  for (const auto& [id, gold] : manifest.images) {
    images.push_back(
        {{"id", id}, {"gold", std::vector<std::string>(gold.begin(), gold.end())}});
  }
  json candidates = json::object();
  for (const auto& [label, ids] : manifest.query_candidates) candidates[label] = ids;
  json j{{"word_feats", manifest.word_feats.filename().string()},
         {"grids_dir", manifest.grids_dir.filename().string()},
         {"images", images},
         {"query_candidates", candidates}};
  write_json_file(path, j);
}

EmbeddingGrid load_grid(const std::filesystem::path& grids_dir, const std::string& image_id) {
  return read_grid_file(grids_dir / (image_id + ".grd"), image_id);
}

FrameFeatureSequence load_frames(const std::filesystem::path& frames_dir,
                                 const std::string& utterance_id) {
  auto rows = read_embedding_file(frames_dir / (utterance_id + ".emb"));
  if (rows.empty()) throw EmptyInput("no frames for " + utterance_id);
  FrameFeatureSequence seq;
  seq.utterance_id = utterance_id;
  seq.dim = static_cast<int>(rows.front().size());
  seq.data.reserve(rows.size() * rows.front().size());
  for (const auto& row : rows) {
    seq.data.insert(seq.data.end(), row.begin(), row.end());
  }
  return seq;
}

void save_frames(const std::filesystem::path& frames_dir, const FrameFeatureSequence& frames) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(frames.frames()));
  for (int i = 0; i < frames.frames(); ++i) {
    rows.emplace_back(frames.frame(i), frames.frame(i) + frames.dim);
  }
  write_embedding_file(frames_dir / (frames.utterance_id + ".emb"), rows);
}

void write_training_history(const std::filesystem::path& path, const TrainResult& result) {
  json epochs = json::array();
  for (const EpochStats& e : result.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_accuracy", e.val_accuracy}});
  }
  json j{{"epochs", epochs},
         {"best_epoch", result.best_epoch},
         {"best_val_accuracy", result.best_val_accuracy},
         {"early_stopped", result.early_stopped}};
  write_json_file(path, j);
}

}  // namespace wv
