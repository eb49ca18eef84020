#ifndef OPERC_ROWS_HPP
#define OPERC_ROWS_HPP

#include <cstdint>
#include <vector>

#include "operc/env.hpp"
#include "operc/lattice.hpp"

namespace operc {

/**
 * Level evolution in diagonal coordinates. A site (x, t) is stored at
 * j = (x + t) / 2; its left-up edge keeps j and its right-up edge moves to
 * j + 1, so one level of growth is two ands, a shift and an or over packed
 * rows. Oriented paths never decrease j, which keeps bands exact: the
 * forward cone of (j0, t0) is j in [j0, j0 + dt].
 */
struct JBand {
  std::int64_t j_lo = 0, j_hi = 0;  // inclusive

  std::int64_t width() const { return j_hi - j_lo + 1; }
  std::size_t words() const {
    return static_cast<std::size_t>((width() + 63) / 64);
  }
  bool contains(std::int64_t j) const { return j >= j_lo && j <= j_hi; }
};

inline std::int64_t to_j(Vertex v) { return (v.x + v.t) >> 1; }
inline Vertex from_j(std::int64_t j, std::int64_t t) { return {2 * j - t, t}; }

/** One packed lattice row over a fixed band. */
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(const JBand& band)
      : band_(band), w_(band.words(), 0) {}

  const JBand& band() const { return band_; }
  std::uint64_t* data() { return w_.data(); }
  const std::uint64_t* data() const { return w_.data(); }
  std::size_t words() const { return w_.size(); }

  void clear();
  bool get(std::int64_t j) const {
    const std::uint64_t i = static_cast<std::uint64_t>(j - band_.j_lo);
    return (w_[i >> 6] >> (i & 63)) & 1;
  }
  void set(std::int64_t j) {
    const std::uint64_t i = static_cast<std::uint64_t>(j - band_.j_lo);
    w_[i >> 6] |= 1ull << (i & 63);
  }
  void reset(std::int64_t j) {
    const std::uint64_t i = static_cast<std::uint64_t>(j - band_.j_lo);
    w_[i >> 6] &= ~(1ull << (i & 63));
  }

  bool any() const;
  std::int64_t count() const;
  // Largest/smallest set j; band_.j_lo - 1 when empty.
  std::int64_t max_set() const;
  std::int64_t min_set() const;
  bool is_subset_of(const BitRow& o) const;

  bool operator==(const BitRow& o) const {
    return band_.j_lo == o.band_.j_lo && band_.j_hi == o.band_.j_hi &&
           w_ == o.w_;
  }

  // Drops any bits beyond the band's width in the top word.
  void mask_tail();

 private:
  JBand band_;
  std::vector<std::uint64_t> w_;
};

// out = (cur & left_open) | ((cur & right_open) << 1), the row one level up.
void step_up(const BitRow& cur, const BitRow& left_open,
             const BitRow& right_open, BitRow& out);

// out = (left_open & above) | (right_open & (above >> 1)): the sites one
// level down that reach `above` through a single open edge.
void step_down(const BitRow& above, const BitRow& left_open,
               const BitRow& right_open, BitRow& out);

void row_and(const BitRow& a, const BitRow& b, BitRow& out);
void row_or_into(BitRow& acc, const BitRow& a);

inline void fill_open(const Environment& env, const JBand& band,
                      std::int64_t t, Side side, BitRow& out) {
  env.open_row(t, band.j_lo, band.j_hi, side, out.data());
  out.mask_tail();
}

/**
 * Grow a row upward from level t0 to t1; visit(t, row) sees every level
 * including the seed. Stops early (without visiting further levels) once
 * the row dies out, since empty rows stay empty.
 */
template <class Visit>
void sweep_up(const Environment& env, const JBand& band, std::int64_t t0,
              BitRow cur, std::int64_t t1, Visit&& visit) {
  visit(t0, static_cast<const BitRow&>(cur));
  BitRow left(band), right(band), next(band);
  for (std::int64_t t = t0; t < t1; ++t) {
    fill_open(env, band, t, Side::LeftUp, left);
    fill_open(env, band, t, Side::RightUp, right);
    step_up(cur, left, right, next);
    std::swap(cur, next);
    visit(t + 1, static_cast<const BitRow&>(cur));
    if (!cur.any()) break;
  }
}

/**
 * Propagate co-reachability downward from a seed row at t1 to t0;
 * visit(t, row) sees every level from t1 down to t0. Row at t holds the
 * sites whose in-band ascent reaches the seed.
 */
template <class Visit>
void sweep_down(const Environment& env, const JBand& band, std::int64_t t1,
                BitRow cur, std::int64_t t0, Visit&& visit) {
  visit(t1, static_cast<const BitRow&>(cur));
  BitRow left(band), right(band), next(band);
  for (std::int64_t t = t1 - 1; t >= t0; --t) {
    fill_open(env, band, t, Side::LeftUp, left);
    fill_open(env, band, t, Side::RightUp, right);
    step_down(cur, left, right, next);
    std::swap(cur, next);
    visit(t, static_cast<const BitRow&>(cur));
  }
}

}  // namespace operc

#endif  // OPERC_ROWS_HPP
