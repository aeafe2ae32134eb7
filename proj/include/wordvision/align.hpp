#pragma once

#include <cstdint>
#include <vector>

#include "wordvision/units.hpp"

namespace wv {

struct ScoringParams {
  double match = 1.0;
  double mismatch = -1.0;
  double gap = -1.0;
  // Free gaps at the target's flanks, so the query aligns to the best span
  // inside the target instead of paying for surrounding context.
  bool free_target_flanks = true;
};

enum class EditOp : std::uint8_t {
  Match,       // equal unit ids
  Substitute,  // differing unit ids
  Delete,      // query segment skipped
  Insert,      // target segment consumed inside the aligned span
};

struct AlignmentResult {
  double score = 0.0;      // raw_score / query segment count
  double raw_score = 0.0;
  int span_begin = 0;      // aligned target region, half-open segment indices
  int span_end = 0;
  std::vector<EditOp> ops;
};

// Best alignment of the query against the target under ScoringParams.
// With free_target_flanks this is semi-global: target prefix/suffix outside
// the aligned span costs nothing. Ties are broken deterministically:
// match/substitute over delete over insert inside the DP, smallest end
// column for the final span.
AlignmentResult nw_align(const SegmentedUtterance& query,
                         const SegmentedUtterance& target,
                         const ScoringParams& scoring = {});

}  // namespace wv
