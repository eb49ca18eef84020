#ifndef OPERC_KUCZEK_HPP
#define OPERC_KUCZEK_HPP

#include <optional>
#include <string>
#include <vector>

#include "operc/paths.hpp"

namespace operc {

/** One level of the right-edge process started from the half line x <= 0. */
struct RightEdgePoint {
  std::int64_t n = 0;              // level
  std::optional<std::int64_t> r;   // rightmost occupied column; empty = extinct
  // Set when the reported value may differ from the untruncated half-line
  // process: the column fell below -N, or the truncated process died out.
  bool truncation_affected = false;

  bool operator==(const RightEdgePoint&) const = default;
};

/**
 * Right edge r_n, n = 0..N, of the process grown from the half line
 * {x <= 0} at level 0, truncated at column -2N. Within N levels, sites left
 * of -2N can only influence columns below -N, so unflagged values are exact.
 */
std::vector<RightEdgePoint> right_edge_series(const Environment& env,
                                              std::int64_t N);

/** Break-point increment m: T = cumulative level, X = column step, tau = level step. */
struct BreakRecord {
  std::int64_t T = 0, X = 0, tau = 0;

  bool operator==(const BreakRecord&) const = default;
};

/**
 * Regeneration decomposition of the right edge of a percolating site: level
 * n >= 1 is a break level when the frontier's rightmost site at n itself
 * reaches the horizon. Records certified later than N - margin are dropped.
 */
class BreakPointSeries {
 public:
  BreakPointSeries(Vertex origin, std::int64_t N, std::int64_t margin,
                   std::vector<BreakRecord> records,
                   std::vector<std::int64_t> r_prime,
                   std::vector<bool> primed);

  Vertex origin() const { return origin_; }
  std::int64_t horizon() const { return N_; }
  std::int64_t margin() const { return margin_; }
  const std::vector<BreakRecord>& records() const { return records_; }

  // Right edge of the frontier at level offset n (absolute column). When
  // primed(n) is true the value is the substituted phantom column x(u)+n,
  // used after extinction; r(n) is then reported extinct.
  std::int64_t r_prime(std::int64_t n) const;
  bool primed(std::int64_t n) const;
  std::optional<std::int64_t> r(std::int64_t n) const;

  // "m,T,X,tau" rows, one per record.
  std::string to_csv() const;

 private:
  Vertex origin_;
  std::int64_t N_ = 0, margin_ = 0;
  std::vector<BreakRecord> records_;
  std::vector<std::int64_t> r_prime_;
  std::vector<bool> primed_;
};

/**
 * Break points of u's right-edge process against horizon N: scans levels
 * 1..N - margin and emits one record per break level. Requires u to reach
 * the horizon (no-path error otherwise).
 */
BreakPointSeries break_points(Vertex u, const Environment& env,
                              std::int64_t N, std::int64_t margin);

/** A jump of the embedded walk, relative to the walk's origin. */
struct WalkJump {
  std::int64_t level = 0;  // level offset from the origin
  std::int64_t col = 0;    // column offset from the origin

  bool operator==(const WalkJump&) const = default;
};

/**
 * The step-function walk assembled from a break-point series: jump m moves
 * to column offset X_1 + .. + X_m at level offset T_m, holding its value
 * between jumps.
 */
class WalkPath {
 public:
  WalkPath(Vertex origin, std::int64_t N, std::int64_t margin,
           std::vector<WalkJump> jumps);

  Vertex origin() const { return origin_; }
  std::int64_t horizon() const { return N_; }
  std::int64_t margin() const { return margin_; }
  const std::vector<WalkJump>& jumps() const { return jumps_; }

  // Step-function value at a level offset in [0, horizon].
  std::int64_t position_at(std::int64_t level) const;
  // Landing column offset when a jump happens exactly at this level offset.
  std::optional<std::int64_t> jump_at(std::int64_t level) const;

  // "level,column" rows, one per jump.
  std::string to_csv() const;

 private:
  Vertex origin_;
  std::int64_t N_ = 0, margin_ = 0;
  std::vector<WalkJump> jumps_;
};

WalkPath walk(Vertex u, const Environment& env, std::int64_t N,
              std::int64_t margin);

/**
 * First vertex where both embedded walks jump at the same absolute level to
 * the same absolute column. Walks from origins at different levels are run
 * against the shared absolute horizon max(t1, t2) + N, and only levels at
 * least `margin` below it count as certified.
 */
std::optional<Vertex> walks_meet(Vertex u1, Vertex u2, const Environment& env,
                                 std::int64_t N, std::int64_t margin);

enum class ExtremalKind { Rightmost, Leftmost };

/**
 * Lowest-level common vertex of the two extremal paths toward the shared
 * absolute horizon max(t1, t2) + N; empty when no common vertex is found
 * at least `margin` levels below the horizon.
 */
std::optional<Vertex> paths_meet(Vertex u1, Vertex u2, const Environment& env,
                                 std::int64_t N, std::int64_t margin,
                                 ExtremalKind kind1 = ExtremalKind::Rightmost,
                                 ExtremalKind kind2 = ExtremalKind::Rightmost);

/**
 * Path vertices whose incoming edge segment intersects the line t = x/alpha
 * (closed segment test, endpoints included). The path origin itself has no
 * incoming edge and is never reported.
 */
std::vector<Vertex> crossing_points(const PathRec& path, double alpha);

}  // namespace operc

#endif  // OPERC_KUCZEK_HPP
