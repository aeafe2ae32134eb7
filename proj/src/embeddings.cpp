#include "wordvision/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "wordvision/common.hpp"
#include "wordvision/simd.hpp"

namespace wv {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine_similarity: dimension mismatch");
  }
  if (a.empty()) throw EmptyInput("cosine_similarity: empty vectors");
  double ab, aa, bb;
  simd::dot3(a.data(), b.data(), a.size(), ab, aa, bb);
  if (aa <= 0.0 || bb <= 0.0) {
    throw ZeroVector("cosine_similarity: zero vector");
  }
  double cos = ab / std::sqrt(aa * bb);
  if (cos > 1.0) cos = 1.0;
  if (cos < -1.0) cos = -1.0;
  return cos;
}

std::vector<ImageRanking> mine_images(
    const std::vector<std::pair<std::string, std::vector<ImageEmbedding>>>& support_by_class,
    const std::vector<ImageEmbedding>& pool, int n) {
  if (pool.empty()) throw EmptyInput("mine_images: empty pool");
  if (n < 1) throw ConfigError("mine_images: n must be >= 1");
  std::vector<ImageRanking> rankings;
  rankings.reserve(support_by_class.size());
  for (const auto& [label, supports] : support_by_class) {
    if (supports.empty()) {
      throw MalformedQueryBank("mine_images: class " + label + " has no support images");
    }
    ImageRanking ranking;
    ranking.class_label = label;
    ranking.entries.resize(pool.size());
    parallel_for(pool.size(), [&](std::size_t i) {
      double best = -2.0;
      for (const ImageEmbedding& s : supports) {
        best = std::max(best, cosine_similarity(s.vector, pool[i].vector));
      }
      ranking.entries[i] = {pool[i].image_id, best};
    });
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const ImageRankingEntry& a, const ImageRankingEntry& b) {
                if (a.similarity != b.similarity) return a.similarity > b.similarity;
                return a.image_id < b.image_id;
              });
    if (static_cast<int>(ranking.entries.size()) > n) {
      ranking.entries.resize(static_cast<std::size_t>(n));
    }
    rankings.push_back(std::move(ranking));
  }
  return rankings;
}

// --- binary I/O -------------------------------------------------------------

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  if (!is) throw Error("embedding file: truncated header");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_f32(std::ostream& os, float f) { put_u32(os, std::bit_cast<std::uint32_t>(f)); }

float get_f32(std::istream& is) { return std::bit_cast<float>(get_u32(is)); }

void write_f32_block(std::ostream& os, const std::vector<double>& values) {
  for (double v : values) put_f32(os, static_cast<float>(v));
}

void expect_magic(std::istream& is, const char* magic, const std::filesystem::path& path) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::string(buf, 4) != magic) {
    throw Error("bad magic in " + path.string() + ", expected " + magic);
  }
}

}  // namespace

void write_embedding_file(const std::filesystem::path& path,
                          const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  const std::uint32_t count = static_cast<std::uint32_t>(rows.size());
  const std::uint32_t dim = rows.empty() ? 0 : static_cast<std::uint32_t>(rows[0].size());
  os.write("EMB1", 4);
  put_u32(os, count);
  put_u32(os, dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw DimensionMismatch("write_embedding_file: ragged rows");
    write_f32_block(os, row);
  }
  if (!os) throw Error("short write to " + path.string());
}

std::vector<std::vector<double>> read_embedding_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  expect_magic(is, "EMB1", path);
  const std::uint32_t count = get_u32(is);
  const std::uint32_t dim = get_u32(is);
  std::vector<std::vector<double>> rows(count);
  for (auto& row : rows) {
    row.resize(dim);
    for (std::uint32_t c = 0; c < dim; ++c) row[c] = static_cast<double>(get_f32(is));
  }
  if (!is) throw Error("truncated embedding file " + path.string());
  return rows;
}

void write_id_sidecar(const std::filesystem::path& emb_path,
                      const std::vector<std::string>& ids) {
  std::filesystem::path p = emb_path;
  p += ".ids";
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  for (const auto& id : ids) os << id << '\n';
}

std::vector<std::string> read_id_sidecar(const std::filesystem::path& emb_path) {
  std::filesystem::path p = emb_path;
  p += ".ids";
  std::ifstream is(p);
  if (!is) throw Error("cannot open " + p.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

std::vector<ImageEmbedding> read_embedding_store(const std::filesystem::path& emb_path) {
  auto rows = read_embedding_file(emb_path);
  auto ids = read_id_sidecar(emb_path);
  if (rows.size() != ids.size()) {
    throw Error("embedding store " + emb_path.string() + ": row/id count mismatch");
  }
  std::vector<ImageEmbedding> store(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    store[i] = {ids[i], std::move(rows[i])};
  }
  return store;
}

void write_embedding_store(const std::filesystem::path& emb_path,
                           const std::vector<ImageEmbedding>& store) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> ids;
  rows.reserve(store.size());
  ids.reserve(store.size());
  for (const auto& e : store) {
    rows.push_back(e.vector);
    ids.push_back(e.image_id);
  }
  write_embedding_file(emb_path, rows);
  write_id_sidecar(emb_path, ids);
}

void write_grid_file(const std::filesystem::path& path, const EmbeddingGrid& grid) {
  if (grid.height < 1 || grid.width < 1 || grid.dim < 1) {
    throw DimensionMismatch("write_grid_file: degenerate grid " + grid.image_id);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os.write("GRD1", 4);
  put_u32(os, static_cast<std::uint32_t>(grid.height));
  put_u32(os, static_cast<std::uint32_t>(grid.width));
  put_u32(os, static_cast<std::uint32_t>(grid.dim));
  write_f32_block(os, grid.data);
  if (!os) throw Error("short write to " + path.string());
}

EmbeddingGrid read_grid_file(const std::filesystem::path& path, const std::string& image_id) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  expect_magic(is, "GRD1", path);
  EmbeddingGrid grid;
  grid.image_id = image_id;
  grid.height = static_cast<int>(get_u32(is));
  grid.width = static_cast<int>(get_u32(is));
  grid.dim = static_cast<int>(get_u32(is));
  const std::size_t n =
      static_cast<std::size_t>(grid.height) * grid.width * grid.dim;
  grid.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) grid.data[i] = static_cast<double>(get_f32(is));
  if (!is) throw Error("truncated grid file " + path.string());
  return grid;
}

}  // namespace wv
