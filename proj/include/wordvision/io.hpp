#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wordvision/model.hpp"
#include "wordvision/pairs.hpp"
#include "wordvision/qbe.hpp"
#include "wordvision/units.hpp"

namespace wv {

// Line-delimited JSON unit records:
// {"utterance_id": str, "units": [int], "frame_duration_ms": number}
std::vector<UnitSequence> read_units_jsonl(const std::filesystem::path& path);
void write_units_jsonl(const std::filesystem::path& path,
                       const std::vector<UnitSequence>& sequences);

// Line-delimited JSON segment records:
// {"utterance_id": str, "segments": [[unit, start, end], ...]}
std::vector<SegmentedUtterance> read_segments_jsonl(const std::filesystem::path& path);
void write_segments_jsonl(const std::filesystem::path& path,
                          const std::vector<SegmentedUtterance>& utterances);

// Loads a corpus for search: records with a "segments" field load directly,
// records with a "units" field are run-length merged.
std::vector<SegmentedUtterance> load_corpus(const std::filesystem::path& path);

// Support-set manifest JSON.
SupportSet read_support_manifest(const std::filesystem::path& path);
void write_support_manifest(const std::filesystem::path& path, const SupportSet& support);

std::vector<MinedWord> read_mined_words(const std::filesystem::path& path);
void write_mined_words(const std::filesystem::path& path,
                       const std::vector<MinedWord>& words);

std::vector<ImageRanking> read_image_rankings(const std::filesystem::path& path);
void write_image_rankings(const std::filesystem::path& path,
                          const std::vector<ImageRanking>& rankings);

MinedPairSet read_pair_set(const std::filesystem::path& path);
void write_pair_set(const std::filesystem::path& path, const MinedPairSet& pairs);

// Gold label maps: {"id": ["label", ...], ...}
std::map<std::string, std::set<std::string>> read_gold_labels(
    const std::filesystem::path& path);
void write_gold_labels(const std::filesystem::path& path,
                       const std::map<std::string, std::set<std::string>>& gold);

std::vector<std::string> read_id_list(const std::filesystem::path& path);
void write_id_list(const std::filesystem::path& path, const std::vector<std::string>& ids);

// Word feature store: EMB1 file with id sidecar.
std::map<std::string, std::vector<double>> read_word_features(
    const std::filesystem::path& emb_path);

// Episodic test manifest.
struct TestManifest {
  std::filesystem::path word_feats;
  std::filesystem::path grids_dir;
  std::vector<std::pair<std::string, std::string>> queries;  // (word id, class)
  std::vector<std::pair<std::string, std::string>> images;   // (image id, class)
};

TestManifest read_test_manifest(const std::filesystem::path& path);
void write_test_manifest(const std::filesystem::path& path, const TestManifest& manifest);

// Retrieval pool manifest.
struct PoolManifest {
  std::filesystem::path word_feats;
  std::filesystem::path grids_dir;
  std::vector<std::pair<std::string, std::set<std::string>>> images;  // (id, gold)
  std::map<std::string, std::vector<std::string>> query_candidates;   // class -> word ids
};

PoolManifest read_pool_manifest(const std::filesystem::path& path);
void write_pool_manifest(const std::filesystem::path& path, const PoolManifest& manifest);

// Grid files live in a directory as "<image_id>.grd".
EmbeddingGrid load_grid(const std::filesystem::path& grids_dir, const std::string& image_id);

// Frame features live in a directory as "<utterance_id>.emb".
FrameFeatureSequence load_frames(const std::filesystem::path& frames_dir,
                                 const std::string& utterance_id);
void save_frames(const std::filesystem::path& frames_dir, const FrameFeatureSequence& frames);

void write_training_history(const std::filesystem::path& path, const TrainResult& result);

}  // namespace wv
