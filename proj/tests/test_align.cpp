#include <doctest.h>

#include "oracles.hpp"
#include "wordvision/align.hpp"
#include "wordvision/common.hpp"

using namespace wv;

namespace {

SegmentedUtterance from_ids(const std::vector<int>& ids) {
  SegmentedUtterance s;
  int frame = 0;
  for (int id : ids) {
    s.segments.push_back({id, frame, frame + 1});
    ++frame;
  }
  return s;
}

std::vector<int> random_ids(int max_len, int vocab, Rng& rng) {
  const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
  std::vector<int> ids(static_cast<std::size_t>(len));
  for (int& id : ids) id = static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab)));
  return ids;
}

}  // namespace

TEST_CASE("identical sequences align perfectly") {
  const auto seq = from_ids({1, 2, 3});
  const AlignmentResult r = nw_align(seq, seq);
  CHECK(r.raw_score == doctest::Approx(3.0));
  CHECK(r.score == doctest::Approx(1.0));
  CHECK(r.span_begin == 0);
  CHECK(r.span_end == 3);
  REQUIRE(r.ops.size() == 3);
  for (EditOp op : r.ops) CHECK(op == EditOp::Match);
}

TEST_CASE("query located inside a longer target") {
  const auto query = from_ids({1, 2, 3});
  const auto target = from_ids({9, 9, 1, 2, 3, 9});
  const AlignmentResult r = nw_align(query, target);
  CHECK(r.raw_score == doctest::Approx(3.0));
  CHECK(r.score == doctest::Approx(1.0));
  CHECK(r.span_begin == 2);
  CHECK(r.span_end == 5);
}

TEST_CASE("empty inputs rejected") {
  const auto seq = from_ids({1});
  CHECK_THROWS_AS(nw_align(SegmentedUtterance{}, seq), EmptyInput);
  CHECK_THROWS_AS(nw_align(seq, SegmentedUtterance{}), EmptyInput);
}

TEST_CASE("alignment equals the brute-force enumerator") {
  Rng rng(1234);
  const ScoringParams scoring;
  for (int trial = 0; trial < 300; ++trial) {
    const auto q = random_ids(6, 4, rng);
    const auto t = random_ids(12, 4, rng);
    const AlignmentResult r = nw_align(from_ids(q), from_ids(t), scoring);
    const double expect =
        oracle::align_free_flanks(q, t, scoring.match, scoring.mismatch, scoring.gap);
    CHECK(r.raw_score == expect);

    // The reported span must itself achieve the raw score under a global
    // alignment of the query against just that span.
    if (r.span_end > r.span_begin) {
      const std::vector<int> span(t.begin() + r.span_begin, t.begin() + r.span_end);
      CHECK(oracle::align_global(q, span, scoring.match, scoring.mismatch, scoring.gap) ==
            r.raw_score);
    }
  }
}

TEST_CASE("global alignment score is symmetric for equal lengths") {
  Rng rng(99);
  ScoringParams scoring;
  scoring.free_target_flanks = false;
  for (int trial = 0; trial < 100; ++trial) {
    const int len = 1 + static_cast<int>(rng.below(6));
    std::vector<int> a(static_cast<std::size_t>(len)), b(static_cast<std::size_t>(len));
    for (int& x : a) x = static_cast<int>(rng.below(4));
    for (int& x : b) x = static_cast<int>(rng.below(4));
    const AlignmentResult ab = nw_align(from_ids(a), from_ids(b), scoring);
    const AlignmentResult ba = nw_align(from_ids(b), from_ids(a), scoring);
    CHECK(ab.score == doctest::Approx(ba.score));
  }
}

TEST_CASE("global alignment equals its enumerator") {
  Rng rng(555);
  ScoringParams scoring;
  scoring.free_target_flanks = false;
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = random_ids(5, 4, rng);
    const auto t = random_ids(8, 4, rng);
    const AlignmentResult r = nw_align(from_ids(q), from_ids(t), scoring);
    CHECK(r.raw_score ==
          oracle::align_global(q, t, scoring.match, scoring.mismatch, scoring.gap));
  }
}

TEST_CASE("corrupting a contained query never raises its score") {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> word = random_ids(6, 10, rng);
    std::vector<int> target;
    for (int i = 0; i < 3; ++i) target.push_back(10 + static_cast<int>(rng.below(5)));
    target.insert(target.end(), word.begin(), word.end());
    for (int i = 0; i < 3; ++i) target.push_back(10 + static_cast<int>(rng.below(5)));

    double previous = nw_align(from_ids(word), from_ids(target)).score;
    CHECK(previous == doctest::Approx(1.0));

    std::vector<int> corrupted = word;
    std::vector<std::size_t> order(word.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t pos : order) {
      corrupted[pos] = 20 + static_cast<int>(rng.below(5));
      const double score = nw_align(from_ids(corrupted), from_ids(target)).score;
      CHECK(score <= previous + 1e-12);
      previous = score;
    }
  }
}

TEST_CASE("deterministic tie-break on the end column") {
  // Two equally good spans: the earlier one wins.
  const auto query = from_ids({1, 2});
  const auto target = from_ids({1, 2, 9, 1, 2});
  const AlignmentResult r = nw_align(query, target);
  CHECK(r.span_begin == 0);
  CHECK(r.span_end == 2);
}
