#ifndef OPERC_LATTICE_HPP
#define OPERC_LATTICE_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "operc/errors.hpp"

namespace operc {

/**
 * The even lattice: sites (x, t) with x + t even. t is the level and
 * increases upward; every site has two oriented edges, one to (x-1, t+1)
 * and one to (x+1, t+1).
 */
struct Vertex {
  std::int64_t x = 0;
  std::int64_t t = 0;

  bool valid() const { return ((x + t) & 1) == 0; }
  auto operator<=>(const Vertex&) const = default;
};

// Order by (t, x); used for serialized vertex lists.
struct VertexLevelOrder {
  bool operator()(const Vertex& a, const Vertex& b) const {
    return a.t != b.t ? a.t < b.t : a.x < b.x;
  }
};

enum class Side : std::uint8_t { LeftUp = 0, RightUp = 1 };

inline char side_char(Side s) { return s == Side::LeftUp ? 'L' : 'R'; }

/** One oriented edge, identified by its lower endpoint and a side. */
struct EdgeRef {
  Vertex from;
  Side side = Side::LeftUp;

  Vertex target() const {
    return {from.x + (side == Side::RightUp ? 1 : -1), from.t + 1};
  }
  auto operator<=>(const EdgeRef&) const = default;
};

/** Closed box of sites. Sites outside a window are treated as absent. */
struct Window {
  std::int64_t x_min = 0, x_max = 0, t_min = 0, t_max = 0;

  bool contains(Vertex v) const {
    return v.x >= x_min && v.x <= x_max && v.t >= t_min && v.t <= t_max;
  }
  bool contains_edge(const EdgeRef& e) const {
    return contains(e.from) && contains(e.target());
  }
  bool covers(const Window& o) const {
    return x_min <= o.x_min && x_max >= o.x_max && t_min <= o.t_min &&
           t_max >= o.t_max;
  }
  std::int64_t height() const { return t_max - t_min; }
  auto operator<=>(const Window&) const = default;
};

inline void require_valid(Vertex v) {
  if (!v.valid())
    throw InvalidVertexError("vertex (" + std::to_string(v.x) + "," +
                             std::to_string(v.t) + ") has odd parity");
}

// Children listed left-first: ((x-1, t+1), (x+1, t+1)).
inline std::pair<Vertex, Vertex> upper_children(Vertex v) {
  require_valid(v);
  return {{v.x - 1, v.t + 1}, {v.x + 1, v.t + 1}};
}

// Parents listed left-first: ((x-1, t-1), (x+1, t-1)).
inline std::pair<Vertex, Vertex> lower_parents(Vertex v) {
  require_valid(v);
  return {{v.x - 1, v.t - 1}, {v.x + 1, v.t - 1}};
}

enum class Direction { Forward, Backward };

// Forward cone: all sites reachable in principle within `depth` levels,
// {(x', t') : |x' - x| <= t' - t <= depth}. Backward is the mirror image.
std::vector<Vertex> cone(Vertex u, Direction dir, std::int64_t depth);

// Joint cone of a set of same-level sites.
std::vector<Vertex> cone_of_set(std::span<const Vertex> a, Direction dir,
                                std::int64_t depth);

// Smallest window containing cone(u, dir, depth).
Window cone_window(Vertex u, Direction dir, std::int64_t depth);

// "x,t"
std::string to_string(Vertex v);
// "x,t,L" or "x,t,R"
std::string to_string(const EdgeRef& e);

Vertex parse_vertex(const std::string& s, long line = 0);
EdgeRef parse_edge(const std::string& s, long line = 0);

std::ostream& operator<<(std::ostream& os, const Vertex& v);

}  // namespace operc

#endif  // OPERC_LATTICE_HPP
