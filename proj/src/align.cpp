#include "wordvision/align.hpp"

#include <algorithm>

#include "wordvision/common.hpp"

namespace wv {

namespace {

enum Move : std::uint8_t { kNone = 0, kDiag = 1, kUp = 2, kLeft = 3 };

}  // namespace

AlignmentResult nw_align(const SegmentedUtterance& query,
                         const SegmentedUtterance& target,
                         const ScoringParams& scoring) {
  if (query.empty()) throw EmptyInput("nw_align: empty query " + query.utterance_id);
  if (target.empty()) throw EmptyInput("nw_align: empty target " + target.utterance_id);

  const std::vector<int> q = segment_ids(query);
  const std::vector<int> t = segment_ids(target);
  const int m = static_cast<int>(q.size());
  const int n = static_cast<int>(t.size());

  // dp is (m+1) x (n+1), row-major; row i = query segments consumed.
  std::vector<double> dp(static_cast<std::size_t>(m + 1) * (n + 1));
  std::vector<std::uint8_t> move(dp.size(), kNone);
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + j; };

  dp[idx(0, 0)] = 0.0;
  for (int i = 1; i <= m; ++i) {
    dp[idx(i, 0)] = i * scoring.gap;
    move[idx(i, 0)] = kUp;
  }
  for (int j = 1; j <= n; ++j) {
    dp[idx(0, j)] = scoring.free_target_flanks ? 0.0 : j * scoring.gap;
    move[idx(0, j)] = scoring.free_target_flanks ? kNone : kLeft;
  }

  for (int i = 1; i <= m; ++i) {
    const int qi = q[static_cast<std::size_t>(i - 1)];
    for (int j = 1; j <= n; ++j) {
      const double diag = dp[idx(i - 1, j - 1)] +
                          (qi == t[static_cast<std::size_t>(j - 1)] ? scoring.match
                                                                    : scoring.mismatch);
      const double up = dp[idx(i - 1, j)] + scoring.gap;
      const double left = dp[idx(i, j - 1)] + scoring.gap;
      // Tie preference: diagonal, then delete, then insert.
      double best = diag;
      std::uint8_t mv = kDiag;
      if (up > best) {
        best = up;
        mv = kUp;
      }
      if (left > best) {
        best = left;
        mv = kLeft;
      }
      dp[idx(i, j)] = best;
      move[idx(i, j)] = mv;
    }
  }

  int end_col = n;
  if (scoring.free_target_flanks) {
    end_col = 0;
    double best = dp[idx(m, 0)];
    for (int j = 1; j <= n; ++j) {
      if (dp[idx(m, j)] > best) {
        best = dp[idx(m, j)];
        end_col = j;
      }
    }
  }

  AlignmentResult result;
  result.raw_score = dp[idx(m, end_col)];
  result.score = result.raw_score / m;
  result.span_end = end_col;

  // Traceback. With free flanks it stops when the query is exhausted; the
  // column reached there is the span start.
  std::vector<EditOp> ops;
  int i = m, j = end_col;
  while (i > 0 || (!scoring.free_target_flanks && j > 0)) {
    switch (move[idx(i, j)]) {
      case kDiag:
        ops.push_back(q[static_cast<std::size_t>(i - 1)] == t[static_cast<std::size_t>(j - 1)]
                          ? EditOp::Match
                          : EditOp::Substitute);
        --i;
        --j;
        break;
      case kUp:
        ops.push_back(EditOp::Delete);
        --i;
        break;
      case kLeft:
        ops.push_back(EditOp::Insert);
        --j;
        break;
      default:
        throw Error("nw_align: corrupt traceback");
    }
  }
  result.span_begin = scoring.free_target_flanks ? j : 0;
  if (!scoring.free_target_flanks) result.span_end = n;
  std::reverse(ops.begin(), ops.end());
  result.ops = std::move(ops);
  return result;
}

}  // namespace wv
