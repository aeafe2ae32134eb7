#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wv {

// Whole-image embedding used for mining comparisons.
struct ImageEmbedding {
  std::string image_id;
  std::vector<double> vector;
};

// Per-pixel embedding grid, row-major (h, w, channel).
struct EmbeddingGrid {
  std::string image_id;
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<double> data;

  int pixels() const { return height * width; }
  std::span<const double> pixel(int h, int w) const {
    return {data.data() + (static_cast<std::size_t>(h) * width + w) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> pixel_flat(int hw) const {
    return {data.data() + static_cast<std::size_t>(hw) * dim, static_cast<std::size_t>(dim)};
  }
};

struct ImageRankingEntry {
  std::string image_id;
  double similarity = 0.0;
};

// Per-class image ranking, sorted by similarity descending, ties broken by
// image_id ascending.
struct ImageRanking {
  std::string class_label;
  std::vector<ImageRankingEntry> entries;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Per class: similarity of each pool image is the max over the class's K
// support embeddings; the top n images are kept. Classes come out in
// support order.
std::vector<ImageRanking> mine_images(
    const std::vector<std::pair<std::string, std::vector<ImageEmbedding>>>& support_by_class,
    const std::vector<ImageEmbedding>& pool, int n);

// --- binary embedding store ("EMB1") -------------------------------------
// magic "EMB1", u32 LE count, u32 LE dim, count*dim float32 LE row-major.
// A sidecar line-delimited file (path + ".ids") maps row -> id.

void write_embedding_file(const std::filesystem::path& path,
                          const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_embedding_file(const std::filesystem::path& path);

void write_id_sidecar(const std::filesystem::path& emb_path,
                      const std::vector<std::string>& ids);
std::vector<std::string> read_id_sidecar(const std::filesystem::path& emb_path);

std::vector<ImageEmbedding> read_embedding_store(const std::filesystem::path& emb_path);
void write_embedding_store(const std::filesystem::path& emb_path,
                           const std::vector<ImageEmbedding>& store);

// --- binary grid format ("GRD1") ------------------------------------------
// magic "GRD1", u32 LE height, width, dim, then h*w*dim float32 LE in
// (h, w, channel) order. One file per image.

void write_grid_file(const std::filesystem::path& path, const EmbeddingGrid& grid);
EmbeddingGrid read_grid_file(const std::filesystem::path& path, const std::string& image_id);

}  // namespace wv
