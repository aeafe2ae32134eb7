#include <doctest.h>

#include "wordvision/common.hpp"
#include "wordvision/units.hpp"

using namespace wv;

TEST_CASE("segment_units merges runs") {
  UnitSequence seq{"u1", {3, 3, 3, 7, 7, 3}, 20.0};
  const SegmentedUtterance seg = segment_units(seq);
  REQUIRE(seg.segments.size() == 3);
  CHECK(seg.segments[0].unit_id == 3);
  CHECK(seg.segments[0].start_frame == 0);
  CHECK(seg.segments[0].end_frame == 3);
  CHECK(seg.segments[1].unit_id == 7);
  CHECK(seg.segments[1].start_frame == 3);
  CHECK(seg.segments[1].end_frame == 5);
  CHECK(seg.segments[2].unit_id == 3);
  CHECK(seg.segments[2].start_frame == 5);
  CHECK(seg.segments[2].end_frame == 6);
}

TEST_CASE("segment_units single frame") {
  const SegmentedUtterance seg = segment_units({"u", {5}, 20.0});
  REQUIRE(seg.segments.size() == 1);
  CHECK(seg.segments[0].unit_id == 5);
  CHECK(seg.segments[0].start_frame == 0);
  CHECK(seg.segments[0].end_frame == 1);
}

TEST_CASE("segment_units rejects empty input") {
  CHECK_THROWS_AS(segment_units({"u", {}, 20.0}), EmptyInput);
}

TEST_CASE("expand round-trips random sequences") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    UnitSequence seq;
    seq.utterance_id = "r";
    const int len = 1 + static_cast<int>(rng.below(200));
    for (int i = 0; i < len; ++i) {
      seq.units.push_back(static_cast<int>(rng.below(50)));
    }
    const SegmentedUtterance seg = segment_units(seq);

    // invariants: contiguous, non-overlapping, no adjacent duplicates
    CHECK(seg.segments.front().start_frame == 0);
    for (std::size_t i = 1; i < seg.segments.size(); ++i) {
      CHECK(seg.segments[i].start_frame == seg.segments[i - 1].end_frame);
      CHECK(seg.segments[i].unit_id != seg.segments[i - 1].unit_id);
    }
    CHECK(expand_segments(seg) == seq.units);

    // idempotence: segmenting the expansion gives the same segments
    const SegmentedUtterance again = segment_units({"r", expand_segments(seg), 20.0});
    REQUIRE(again.segments.size() == seg.segments.size());
    for (std::size_t i = 0; i < seg.segments.size(); ++i) {
      CHECK(again.segments[i].unit_id == seg.segments[i].unit_id);
      CHECK(again.segments[i].start_frame == seg.segments[i].start_frame);
      CHECK(again.segments[i].end_frame == seg.segments[i].end_frame);
    }
  }
}

TEST_CASE("slice rebases frames") {
  const SegmentedUtterance seg = segment_units({"u", {1, 1, 2, 3, 3, 3, 4}, 20.0});
  const SegmentedUtterance mid = seg.slice(1, 3);
  REQUIRE(mid.segments.size() == 2);
  CHECK(mid.segments[0].unit_id == 2);
  CHECK(mid.segments[0].start_frame == 0);
  CHECK(mid.segments[0].end_frame == 1);
  CHECK(mid.segments[1].unit_id == 3);
  CHECK(mid.segments[1].start_frame == 1);
  CHECK(mid.segments[1].end_frame == 4);
  CHECK_THROWS(seg.slice(2, 9));
}
