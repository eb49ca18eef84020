#ifndef OPERC_PATHS_HPP
#define OPERC_PATHS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "operc/reach.hpp"

namespace operc {

/**
 * An oriented open path stored as origin plus step letters. Forward paths
 * climb one level per step (L to x-1, R to x+1); anti paths descend one
 * level per step (L to the left parent x-1, R to the right parent x+1).
 */
struct PathRec {
  Vertex origin;
  bool anti = false;
  std::vector<Side> steps;

  std::int64_t length() const {
    return static_cast<std::int64_t>(steps.size());
  }
  std::int64_t level_lo() const { return anti ? origin.t - length() : origin.t; }
  std::int64_t level_hi() const { return anti ? origin.t : origin.t + length(); }

  std::vector<Vertex> vertices() const;  // origin first
  Vertex vertex_at(std::int64_t t) const;  // throws NotOnPathError off-range
  std::int64_t column_at(std::int64_t t) const { return vertex_at(t).x; }

  // "origin x,t; steps RLRR"
  std::string serialize() const;
  static PathRec parse(const std::string& s, long line = 0);

  bool operator==(const PathRec&) const = default;
};

/**
 * The rightmost open path from u that stays on sites still reaching
 * relative height N: at each level no site strictly to its right is both
 * reachable from u and able to reach the horizon. Throws NoPathError when
 * u itself does not reach the horizon.
 */
PathRec rightmost_path(Vertex u, std::int64_t N, const Environment& env);

/** Mirror image: leftmost open path to the horizon. */
PathRec leftmost_path(Vertex u, std::int64_t N, const Environment& env);

/**
 * Time-reversed mirror: the leftmost anti-oriented open path descending
 * `depth` levels from u through sites that are still reached from the
 * bottom of the backward cone.
 */
PathRec anti_leftmost_path(Vertex u, std::int64_t depth,
                           const Environment& env);

enum class PathSide { Left, Right };

/**
 * Bud set of a path vertex v: sites off the path, on the given side of it
 * (columns compared at equal level; levels outside the path's range are
 * excluded), reachable from v by open paths that use no edge of the path.
 */
std::vector<Vertex> buds(Vertex v, const PathRec& path, PathSide side,
                         const Environment& env, const Window& window);

/**
 * Union of bud sets planted on the piece of the path from a (inclusive)
 * to b (exclusive); a must not come after b in path order.
 */
std::vector<Vertex> side_cluster(const PathRec& path, Vertex a, Vertex b,
                                 PathSide side, const Environment& env,
                                 const Window& window);

/**
 * Height up to which the rightmost path is insensitive to pushing the
 * certification horizon from N1 out to N2: the number of leading steps on
 * which the two paths agree.
 */
std::int64_t stabilization_prefix(Vertex u, const Environment& env,
                                  std::int64_t n1, std::int64_t n2);

/**
 * Rightmost paths of several same-level origins toward one shared
 * absolute horizon level, sharing a single co-reachability sweep.
 * Entry i is empty when origin i does not reach the horizon.
 */
std::vector<std::optional<PathRec>> rightmost_paths_to_horizon(
    std::span<const Vertex> origins, std::int64_t horizon,
    const Environment& env);

}  // namespace operc

#endif  // OPERC_PATHS_HPP
