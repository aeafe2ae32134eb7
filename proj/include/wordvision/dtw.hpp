#pragma once

#include <string>
#include <vector>

namespace wv {

// Frame-level real-valued features for one utterance; all frames share one
// dimension.
struct FrameFeatureSequence {
  std::string utterance_id;
  int dim = 0;
  std::vector<double> data;  // frame-major, frames() x dim

  int frames() const { return dim > 0 ? static_cast<int>(data.size()) / dim : 0; }
  const double* frame(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
};

// cosine distance in [0, 2]
double cosine_frame_distance(const double* a, const double* b, int dim);

// DTW with per-step cosine distance and the symmetric step pattern
// (diagonal/vertical/horizontal, unit weights). The accumulated cost of the
// best path is divided by the number of cells on that path; ties on total
// cost prefer the shorter path. Result lies in [0, 2].
double dtw_distance(const FrameFeatureSequence& a, const FrameFeatureSequence& b);

}  // namespace wv
