#pragma once

#include <string>
#include <vector>

namespace wv {

// Per-frame discrete unit ids for one utterance.
struct UnitSequence {
  std::string utterance_id;
  std::vector<int> units;
  double frame_duration_ms = 20.0;
};

// Maximal run of identical units; [start_frame, end_frame) in source frames.
struct Segment {
  int unit_id = 0;
  int start_frame = 0;
  int end_frame = 0;
};

struct SegmentedUtterance {
  std::string utterance_id;
  std::vector<Segment> segments;

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }

  // Segment-index slice [begin, end), frame bookkeeping rebased to zero.
  SegmentedUtterance slice(int begin, int end) const;
};

// Run-length merge of consecutive identical unit ids.
SegmentedUtterance segment_units(const UnitSequence& seq);

// Inverse of segment_units: repeat each segment's unit id for its duration.
std::vector<int> expand_segments(const SegmentedUtterance& seg);

// Segment-level unit ids (one per segment), convenience for alignment.
std::vector<int> segment_ids(const SegmentedUtterance& seg);

}  // namespace wv
