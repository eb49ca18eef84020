#ifndef OPERC_REACH_HPP
#define OPERC_REACH_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "operc/rows.hpp"

namespace operc {

/** Occupied columns of one level; columns are sorted and parity-matched. */
struct Frontier {
  std::int64_t t = 0;
  std::vector<std::int64_t> cols;

  bool operator==(const Frontier&) const = default;
};

/** A set of sites stored as packed rows over a contiguous level range. */
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::int64_t t0, std::vector<BitRow> rows);

  bool contains(Vertex v) const;
  std::int64_t size() const;
  std::int64_t t_min() const { return t0_; }
  std::int64_t t_max() const {
    return t0_ + static_cast<std::int64_t>(rows_.size()) - 1;
  }
  std::int64_t level_count(std::int64_t t) const;
  const BitRow* row(std::int64_t t) const;

  std::vector<Vertex> to_vector() const;  // sorted by (t, x)
  void write(std::ostream& os) const;     // "x,t" lines in that order

 private:
  std::int64_t t0_ = 0;
  std::vector<BitRow> rows_;
};

/**
 * Evolve a frontier upward `steps` levels and return all steps, seed
 * included. With `prime` set, an extinct level k is replaced by the
 * singleton column {t0 + k} (and evolution continues from that site), so
 * the right edge keeps moving after extinction instead of vanishing.
 * A window, when given, clips growth to its columns (absorbing).
 */
std::vector<Frontier> evolve_frontier(const Frontier& a, std::int64_t steps,
                                      const Environment& env,
                                      std::optional<Window> window = {},
                                      bool prime = false);

// Forward cluster of u clipped to the window. u must lie in the window.
VertexSet cluster(Vertex u, const Environment& env, const Window& window);

// All sites v with an open oriented path v -> u, down to depth levels
// below u. Exact: the backward cone is derived internally.
VertexSet anti_cluster(Vertex u, const Environment& env, std::int64_t depth);

/**
 * Does u reach relative height N? Without a window the forward cone is
 * derived internally and the result is exact; the environment must cover
 * it. With a window, reachability is within that window (absorbing).
 */
bool percolates_to(Vertex u, std::int64_t N, const Environment& env,
                   std::optional<Window> window = {});

/** Finite-volume stand-in for the percolating sites of a window. */
struct PercSet {
  Window window;
  std::int64_t N = 0;
  bool bidirectional = false;
  std::vector<Vertex> members;  // sorted by (t, x)

  bool contains(Vertex v) const;
  void write(std::ostream& os) const;  // "N=.., bidirectional=.." then "x,t"
};

// Members: sites of the window reaching relative height N (and, when
// bidirectional, also reached from relative depth N below). Exact; the
// environment must cover the window fattened by N in every direction used.
PercSet perc_points(const Window& window, std::int64_t N,
                    const Environment& env, bool bidirectional = false);

// (C_u1 XOR C_u2) clipped to the window, both clusters window-clipped.
VertexSet symmetric_difference(Vertex u1, Vertex u2, const Environment& env,
                               const Window& window);

/** Per-level symmetric-difference sizes from one shared sweep. */
struct SymmDiffCounts {
  std::vector<std::int64_t> level_counts;  // index t - u1.t, size N + 1
  bool alive1 = false, alive2 = false;     // cluster reaches the top level
};

/**
 * |C_u1 XOR C_u2| at every level u1.t .. u1.t + N, clusters cone-exact.
 * Equal to composing symmetric_difference over the joint cone box with
 * per-level counts, but one sweep fills each open row once, clipped to the
 * joint cone, and steps both frontiers over it. Origins must share a level.
 */
SymmDiffCounts symm_diff_level_counts(Vertex u1, Vertex u2,
                                      const Environment& env, std::int64_t N);

// --- engine-level helpers shared by the path and genealogy layers ------

// Band that covers every site of the window.
JBand band_for_window(const Window& w);

// Clears bits outside the window's column range at level t.
void mask_to_window(BitRow& row, const Window& w, std::int64_t t);

// Raise InsufficientWindowError unless the environment covers `needed`.
void require_coverage(const Environment& env, const Window& needed);

/**
 * Co-reachability rows: element [t - t_lo] holds the sites at level t
 * whose in-band ascent reaches level t_hi. Seeded with the full band row
 * at the horizon.
 */
std::vector<BitRow> horizon_reach_rows(const Environment& env,
                                       const JBand& band, std::int64_t t_lo,
                                       std::int64_t t_hi);

}  // namespace operc

#endif  // OPERC_REACH_HPP
