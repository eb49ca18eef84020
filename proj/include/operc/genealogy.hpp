#ifndef OPERC_GENEALOGY_HPP
#define OPERC_GENEALOGY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "operc/reach.hpp"

namespace operc {

/**
 * The forest of rightmost paths over a window: vertices are the window
 * sites that reach the shared absolute horizon t_max + N, and each vertex's
 * mother is the next vertex on its rightmost path toward that horizon.
 * Sharing one horizon makes mother chains compose into rightmost paths
 * exactly, so daughters, sisters and branches are mutually consistent.
 *
 * Window truncation is tracked, never guessed: a mother beyond the window
 * is flagged, a daughter list whose candidate slots fall outside the window
 * is marked incomplete, and sigma is 0 when the sister slot is unseen.
 */
class Forest {
 public:
  // Fixture constructor: adopt explicit child->mother links as a closed
  // world (daughter lists complete, nothing truncated).
  static Forest from_links(
      const Window& window,
      const std::vector<std::pair<Vertex, Vertex>>& child_mother);

  const Window& window() const { return window_; }
  std::int64_t horizon() const { return N_; }
  std::int64_t margin() const { return margin_; }
  // Window inset by the margin on every side: the region whose genealogy
  // queries are expected to resolve without hitting the window edge.
  Window safe_subwindow() const;

  std::int64_t size() const { return static_cast<std::int64_t>(verts_.size()); }
  const std::vector<Vertex>& vertices() const { return verts_; }  // (t,x) sorted
  bool contains(Vertex u) const { return find(u) >= 0; }

  std::optional<Vertex> mother(Vertex u) const;
  // True when u's mother exists beyond the window (top row or side exit).
  bool mother_truncated(Vertex u) const;
  std::vector<Vertex> daughters(Vertex u) const;  // older first
  bool daughters_complete(Vertex u) const;
  // 1 = older sister or only daughter, 2 = younger sister, 0 = undecidable.
  int sigma(Vertex u) const;

  std::int64_t component(Vertex u) const;
  std::int64_t component_count() const { return component_count_; }
  std::vector<Vertex> component_members(std::int64_t label) const;

  // "child_x,child_t,mother_x,mother_t,sigma" rows for in-window links.
  std::string dump() const;

 private:
  friend Forest build_forest(const Window& window, std::int64_t N,
                             const Environment& env, std::int64_t margin);
  friend std::optional<Vertex> successor(Vertex u, const Forest& f);
  friend std::optional<Vertex> predecessor(Vertex u, const Forest& f);
  friend bool precedes(Vertex u, Vertex v, const Forest& f);

  Forest() = default;

  static std::uint64_t key(Vertex v);
  std::int32_t find(Vertex v) const;  // -1 when absent
  std::int32_t require(Vertex v) const;  // NotInForestError when absent
  // Daughters, sigma and components from the mother links. closed_world
  // treats the links as the whole truth (fixtures); otherwise coordinates
  // outside the window stay undecided.
  void derive_family(bool closed_world);

  Window window_{};
  std::int64_t N_ = 0, margin_ = 0;
  std::vector<Vertex> verts_;
  std::unordered_map<std::uint64_t, std::int32_t> index_;
  std::vector<std::int32_t> mother_;              // index or -1
  std::vector<std::uint8_t> mother_side_;         // 0 left-up, 1 right-up
  std::vector<std::uint8_t> has_side_;            // side known at all
  std::vector<std::uint8_t> mother_truncated_;
  std::vector<std::array<std::int32_t, 2>> daughters_;  // [older, younger]
  std::vector<std::uint8_t> daughters_complete_;
  std::vector<std::uint8_t> sigma_;
  std::vector<std::int32_t> component_;
  std::int64_t component_count_ = 0;
};

/**
 * Build the forest of a window against horizon N >= 1. Requires the
 * environment to cover the sweep rectangle spanned by the window's forward
 * cones up to t_max + N. margin < 0 selects the default N/5.
 */
Forest build_forest(const Window& window, std::int64_t N,
                    const Environment& env, std::int64_t margin = -1);

struct KinshipRecord {
  std::optional<Vertex> mother;
  bool mother_truncated = false;
  std::vector<Vertex> daughters;  // older first
  bool daughters_complete = false;
  int sigma = 0;
};

KinshipRecord kinship(Vertex u, const Forest& f);

// Mother iterated n times; empty when the chain leaves the window first.
std::optional<Vertex> nth_mother(Vertex u, std::int64_t n, const Forest& f);

/**
 * Whether u comes before v in the genealogical order: compares, at the
 * closest common ancestor, the sister ranks of the two approach children
 * (rank 0 for the ancestor itself). Throws UndecidableError when the
 * ancestor chains leave the window before meeting.
 */
bool precedes(Vertex u, Vertex v, const Forest& f);

/**
 * Next vertex in genealogical order: the older daughter when daughters
 * exist, else the younger sister of the nearest ancestor that has one.
 * Empty when the answer cannot be certified inside the window.
 */
std::optional<Vertex> successor(Vertex u, const Forest& f);

/**
 * Previous vertex in genealogical order: the mother when u is an older or
 * only daughter; when u is a younger sister, the youngest-descent leaf of
 * its older sister. Empty when not certifiable inside the window.
 */
std::optional<Vertex> predecessor(Vertex u, const Forest& f);

// Pi^{-k}(u) .. u .. Pi^{k}(u), truncated where steps are uncertified.
std::vector<Vertex> succession_line(Vertex u, std::int64_t k, const Forest& f);

struct BranchResult {
  std::vector<Vertex> members;  // certified descendants of u, u included
  bool truncated = false;       // some daughter chain left the window
};

BranchResult branch(Vertex u, const Forest& f);

}  // namespace operc

#endif  // OPERC_GENEALOGY_HPP
