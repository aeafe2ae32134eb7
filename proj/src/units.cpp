#include "wordvision/units.hpp"

#include "wordvision/common.hpp"

namespace wv {

SegmentedUtterance SegmentedUtterance::slice(int begin, int end) const {
  if (begin < 0 || end > static_cast<int>(segments.size()) || begin > end) {
    throw Error("SegmentedUtterance::slice: span out of range for " + utterance_id);
  }
  SegmentedUtterance out;
  out.utterance_id = utterance_id;
  out.segments.reserve(static_cast<std::size_t>(end - begin));
  int frame = 0;
  for (int i = begin; i < end; ++i) {
    const Segment& s = segments[static_cast<std::size_t>(i)];
    int len = s.end_frame - s.start_frame;
    out.segments.push_back({s.unit_id, frame, frame + len});
    frame += len;
  }
  return out;
}

SegmentedUtterance segment_units(const UnitSequence& seq) {
  if (seq.units.empty()) {
    throw EmptyInput("segment_units: empty unit sequence for " + seq.utterance_id);
  }
  SegmentedUtterance out;
  out.utterance_id = seq.utterance_id;
  int run_start = 0;
  for (int i = 1; i <= static_cast<int>(seq.units.size()); ++i) {
    if (i == static_cast<int>(seq.units.size()) ||
        seq.units[static_cast<std::size_t>(i)] != seq.units[static_cast<std::size_t>(run_start)]) {
      out.segments.push_back({seq.units[static_cast<std::size_t>(run_start)], run_start, i});
      run_start = i;
    }
  }
  return out;
}

std::vector<int> expand_segments(const SegmentedUtterance& seg) {
  std::vector<int> out;
  for (const Segment& s : seg.segments) {
    for (int f = s.start_frame; f < s.end_frame; ++f) out.push_back(s.unit_id);
  }
  return out;
}

std::vector<int> segment_ids(const SegmentedUtterance& seg) {
  std::vector<int> out;
  out.reserve(seg.segments.size());
  for (const Segment& s : seg.segments) out.push_back(s.unit_id);
  return out;
}

}  // namespace wv
