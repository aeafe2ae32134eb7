#include "wordvision/dtw.hpp"

#include <cmath>
#include <limits>

#include "wordvision/common.hpp"
#include "wordvision/simd.hpp"

namespace wv {

double cosine_frame_distance(const double* a, const double* b, int dim) {
  double ab, aa, bb;
  simd::dot3(a, b, static_cast<std::size_t>(dim), ab, aa, bb);
  if (aa <= 0.0 || bb <= 0.0) {
    throw ZeroVector("cosine_frame_distance: zero-norm frame");
  }
  double cos = ab / std::sqrt(aa * bb);
  if (cos > 1.0) cos = 1.0;
  if (cos < -1.0) cos = -1.0;
  return 1.0 - cos;
}

double dtw_distance(const FrameFeatureSequence& a, const FrameFeatureSequence& b) {
  if (a.frames() == 0 || b.frames() == 0) {
    throw EmptyInput("dtw_distance: empty sequence");
  }
  if (a.dim != b.dim) {
    throw DimensionMismatch("dtw_distance: dimension mismatch between " + a.utterance_id +
                            " and " + b.utterance_id);
  }

  const int na = a.frames();
  const int nb = b.frames();
  const double inf = std::numeric_limits<double>::infinity();

  // Two-row DP carrying (total cost, path cell count); smaller total wins,
  // ties prefer fewer cells.
  std::vector<double> prev_cost(static_cast<std::size_t>(nb) + 1, inf);
  std::vector<int> prev_len(static_cast<std::size_t>(nb) + 1, 0);
  std::vector<double> cur_cost(prev_cost);
  std::vector<int> cur_len(prev_len);

  for (int i = 0; i < na; ++i) {
    cur_cost.assign(static_cast<std::size_t>(nb) + 1, inf);
    cur_len.assign(static_cast<std::size_t>(nb) + 1, 0);
    for (int j = 0; j < nb; ++j) {
      const double cost = cosine_frame_distance(a.frame(i), b.frame(j), a.dim);
      double best_cost;
      int best_len;
      if (i == 0 && j == 0) {
        best_cost = 0.0;
        best_len = 0;
      } else {
        best_cost = prev_cost[static_cast<std::size_t>(j)];  // diagonal
        best_len = prev_len[static_cast<std::size_t>(j)];
        const double up = prev_cost[static_cast<std::size_t>(j) + 1];
        if (up < best_cost ||
            (up == best_cost && prev_len[static_cast<std::size_t>(j) + 1] < best_len)) {
          best_cost = up;
          best_len = prev_len[static_cast<std::size_t>(j) + 1];
        }
        const double left = cur_cost[static_cast<std::size_t>(j)];
        if (left < best_cost ||
            (left == best_cost && cur_len[static_cast<std::size_t>(j)] < best_len)) {
          best_cost = left;
          best_len = cur_len[static_cast<std::size_t>(j)];
        }
      }
      cur_cost[static_cast<std::size_t>(j) + 1] = best_cost + cost;
      cur_len[static_cast<std::size_t>(j) + 1] = best_len + 1;
    }
    std::swap(prev_cost, cur_cost);
    std::swap(prev_len, cur_len);
  }

  return prev_cost[static_cast<std::size_t>(nb)] / prev_len[static_cast<std::size_t>(nb)];
}

}  // namespace wv
