#include "operc/reach.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

namespace operc {

// --- VertexSet ---------------------------------------------------------

VertexSet::VertexSet(std::int64_t t0, std::vector<BitRow> rows)
    : t0_(t0), rows_(std::move(rows)) {}

bool VertexSet::contains(Vertex v) const {
  if (!v.valid()) return false;
  const std::int64_t k = v.t - t0_;
  if (k < 0 || k >= static_cast<std::int64_t>(rows_.size())) return false;
  const std::int64_t j = to_j(v);
  return rows_[k].band().contains(j) && rows_[k].get(j);
}

std::int64_t VertexSet::size() const {
  std::int64_t n = 0;
  for (const BitRow& r : rows_) n += r.count();
  return n;
}

std::int64_t VertexSet::level_count(std::int64_t t) const {
  const std::int64_t k = t - t0_;
  if (k < 0 || k >= static_cast<std::int64_t>(rows_.size())) return 0;
  return rows_[k].count();
}

const BitRow* VertexSet::row(std::int64_t t) const {
  const std::int64_t k = t - t0_;
  if (k < 0 || k >= static_cast<std::int64_t>(rows_.size())) return nullptr;
  return &rows_[k];
}

std::vector<Vertex> VertexSet::to_vector() const {
  std::vector<Vertex> out;
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const std::int64_t t = t0_ + static_cast<std::int64_t>(k);
    const BitRow& r = rows_[k];
    for (std::int64_t j = r.band().j_lo; j <= r.band().j_hi; ++j)
      if (r.get(j)) out.push_back(from_j(j, t));
  }
  return out;
}

void VertexSet::write(std::ostream& os) const {
  for (const Vertex& v : to_vector()) os << v.x << ',' << v.t << '\n';
}

// --- helpers -----------------------------------------------------------

JBand band_for_window(const Window& w) {
  return {(w.x_min + w.t_min + 1) >> 1, (w.x_max + w.t_max) >> 1};
}

void mask_to_window(BitRow& row, const Window& w, std::int64_t t) {
  const std::int64_t lo = (w.x_min + t + 1) >> 1;
  const std::int64_t hi = (w.x_max + t) >> 1;
  const JBand& b = row.band();
  for (std::int64_t j = b.j_lo; j < std::min(lo, b.j_hi + 1); ++j) row.reset(j);
  for (std::int64_t j = std::max(hi + 1, b.j_lo); j <= b.j_hi; ++j)
    row.reset(j);
}

void require_coverage(const Environment& env, const Window& needed) {
  const auto b = env.bounds();
  if (b && !b->covers(needed))
    throw InsufficientWindowError(
        "environment window does not cover the light cone of the query");
}

std::vector<BitRow> horizon_reach_rows(const Environment& env,
                                       const JBand& band, std::int64_t t_lo,
                                       std::int64_t t_hi) {
  BitRow seed(band);
  for (std::int64_t j = band.j_lo; j <= band.j_hi; ++j) seed.set(j);
  std::vector<BitRow> rows(static_cast<std::size_t>(t_hi - t_lo + 1));
  sweep_down(env, band, t_hi, std::move(seed), t_lo,
             [&](std::int64_t t, const BitRow& r) {
               rows[static_cast<std::size_t>(t - t_lo)] = r;
             });
  return rows;
}

// --- frontier evolution -----------------------------------------------

std::vector<Frontier> evolve_frontier(const Frontier& a, std::int64_t steps,
                                      const Environment& env,
                                      std::optional<Window> window,
                                      bool prime) {
  if (steps < 0) throw ContractError("steps must be >= 0");
  for (std::int64_t c : a.cols) {
    Vertex v{c, a.t};
    require_valid(v);
    if (window && !window->contains(v))
      throw OutOfWindowError("frontier column " + to_string(v) +
                             " outside window");
  }

  // Band: forward cone of the seed, plus the diagonal sites the prime
  // convention can introduce, clipped to the window when one is given.
  std::int64_t j_lo, j_hi;
  if (!a.cols.empty()) {
    j_lo = to_j({a.cols.front(), a.t});
    j_hi = to_j({a.cols.back(), a.t});
    for (std::int64_t c : a.cols) {
      j_lo = std::min(j_lo, to_j({c, a.t}));
      j_hi = std::max(j_hi, to_j({c, a.t}));
    }
  } else {
    j_lo = a.t;
    j_hi = a.t;
  }
  j_hi += steps;
  if (prime) {
    j_lo = std::min(j_lo, a.t + 1);
    j_hi = std::max(j_hi, a.t + steps);
  }
  if (window) {
    const JBand wb = band_for_window(*window);
    j_lo = std::max(j_lo, wb.j_lo);
    j_hi = std::min(j_hi, wb.j_hi);
    if (j_lo > j_hi) j_hi = j_lo;
  }
  const JBand band{j_lo, j_hi};

  BitRow cur(band);
  for (std::int64_t c : a.cols) {
    const std::int64_t j = to_j({c, a.t});
    if (band.contains(j)) cur.set(j);
  }
  if (window) mask_to_window(cur, *window, a.t);

  std::vector<Frontier> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  const auto emit = [&](std::int64_t t, const BitRow& r) {
    Frontier f{t, {}};
    for (std::int64_t j = band.j_lo; j <= band.j_hi; ++j)
      if (r.get(j)) f.cols.push_back(2 * j - t);
    out.push_back(std::move(f));
  };

  emit(a.t, cur);
  BitRow left(band), right(band), next(band);
  for (std::int64_t t = a.t; t < a.t + steps; ++t) {
    fill_open(env, band, t, Side::LeftUp, left);
    fill_open(env, band, t, Side::RightUp, right);
    step_up(cur, left, right, next);
    std::swap(cur, next);
    if (window) mask_to_window(cur, *window, t + 1);
    if (prime && !cur.any()) {
      const std::int64_t col = t + 1;  // singleton {t0 + k} at step k
      const std::int64_t j = to_j({col, t + 1});
      if (band.contains(j)) cur.set(j);
      if (window) mask_to_window(cur, *window, t + 1);
    }
    emit(t + 1, cur);
  }
  return out;
}

// --- clusters ----------------------------------------------------------

namespace {

VertexSet forward_set(Vertex u, const Environment& env, const Window& window) {
  require_valid(u);
  if (!window.contains(u))
    throw OutOfWindowError("site " + to_string(u) + " outside window");
  const Window cw = cone_window(u, Direction::Forward, window.t_max - u.t);
  require_coverage(env, Window{std::max(window.x_min, cw.x_min),
                               std::min(window.x_max, cw.x_max), u.t,
                               window.t_max});
  const JBand wb = band_for_window(window);
  const JBand band{std::max(to_j(u), wb.j_lo),
                   std::min(to_j(u) + window.t_max - u.t, wb.j_hi)};
  // The window truncates sideways as well as in j: mask the live row each
  // level so nothing propagates through sites outside the window.
  std::vector<BitRow> rows;
  BitRow cur(band);
  cur.set(to_j(u));
  mask_to_window(cur, window, u.t);
  rows.push_back(cur);
  BitRow left(band), right(band), next(band);
  for (std::int64_t t = u.t; t < window.t_max && cur.any(); ++t) {
    fill_open(env, band, t, Side::LeftUp, left);
    fill_open(env, band, t, Side::RightUp, right);
    step_up(cur, left, right, next);
    std::swap(cur, next);
    mask_to_window(cur, window, t + 1);
    rows.push_back(cur);
  }
  // growth stops on extinction; pad to the full level range.
  while (rows.size() < static_cast<std::size_t>(window.t_max - u.t + 1))
    rows.emplace_back(band);
  return VertexSet(u.t, std::move(rows));
}

}  // namespace

VertexSet cluster(Vertex u, const Environment& env, const Window& window) {
  return forward_set(u, env, window);
}

VertexSet anti_cluster(Vertex u, const Environment& env, std::int64_t depth) {
  require_valid(u);
  if (depth < 0) throw ContractError("depth must be >= 0");
  require_coverage(env, cone_window(u, Direction::Backward, depth));
  const JBand band{to_j(u) - depth, to_j(u)};
  BitRow seed(band);
  seed.set(to_j(u));
  std::vector<BitRow> rows(static_cast<std::size_t>(depth + 1));
  sweep_down(env, band, u.t, std::move(seed), u.t - depth,
             [&](std::int64_t t, const BitRow& r) {
               rows[static_cast<std::size_t>(t - (u.t - depth))] = r;
             });
  return VertexSet(u.t - depth, std::move(rows));
}

bool percolates_to(Vertex u, std::int64_t N, const Environment& env,
                   std::optional<Window> window) {
  require_valid(u);
  if (N < 0) throw ContractError("height must be >= 0");
  if (window) {
    if (!window->contains(u))
      throw OutOfWindowError("site " + to_string(u) + " outside window");
    if (u.t + N > window->t_max)
      throw InsufficientWindowError(
          "window too short to certify the requested height");
    const VertexSet c = cluster(u, env, *window);
    return c.level_count(u.t + N) > 0;
  }
  require_coverage(env, cone_window(u, Direction::Forward, N));
  const JBand band{to_j(u), to_j(u) + N};
  bool alive = false;
  BitRow seed(band);
  seed.set(to_j(u));
  sweep_up(env, band, u.t, std::move(seed), u.t + N,
           [&](std::int64_t t, const BitRow& r) {
             if (t == u.t + N) alive = r.any();
           });
  return alive;
}

// --- percolating-site sets ----------------------------------------------

bool PercSet::contains(Vertex v) const {
  return std::binary_search(members.begin(), members.end(), v,
                            VertexLevelOrder{});
}

void PercSet::write(std::ostream& os) const {
  os << "N=" << N << " bidirectional=" << (bidirectional ? 1 : 0) << '\n';
  for (const Vertex& v : members) os << v.x << ',' << v.t << '\n';
}

PercSet perc_points(const Window& window, std::int64_t N,
                    const Environment& env, bool bidirectional) {
  if (N < 0) throw ContractError("height must be >= 0");
  Window needed{window.x_min - N, window.x_max + N,
                bidirectional ? window.t_min - N : window.t_min,
                window.t_max + N};
  require_coverage(env, needed);

  PercSet out{window, N, bidirectional, {}};
  for (std::int64_t t = window.t_min; t <= window.t_max; ++t) {
    const std::int64_t row_lo = (window.x_min + t + 1) >> 1;
    const std::int64_t row_hi = (window.x_max + t) >> 1;
    if (row_lo > row_hi) continue;

    const JBand up_band{row_lo, row_hi + N};
    const std::vector<BitRow> reach =
        horizon_reach_rows(env, up_band, t, t + N);
    const BitRow& fwd = reach.front();

    BitRow bwd_ok(up_band);
    if (bidirectional) {
      // A site is reached from depth N below iff the frontier grown from
      // the full row N levels down covers it.
      const JBand down_band{row_lo - N, row_hi};
      BitRow seed(down_band);
      for (std::int64_t j = down_band.j_lo; j <= down_band.j_hi; ++j)
        seed.set(j);
      sweep_up(env, down_band, t - N, std::move(seed), t,
               [&](std::int64_t lt, const BitRow& r) {
                 if (lt != t) return;
                 for (std::int64_t j = row_lo; j <= row_hi; ++j)
                   if (r.get(j)) bwd_ok.set(j);
               });
    }

    for (std::int64_t j = row_lo; j <= row_hi; ++j) {
      if (!fwd.get(j)) continue;
      if (bidirectional && !bwd_ok.get(j)) continue;
      out.members.push_back(from_j(j, t));
    }
  }
  std::sort(out.members.begin(), out.members.end(), VertexLevelOrder{});
  return out;
}

VertexSet symmetric_difference(Vertex u1, Vertex u2, const Environment& env,
                               const Window& window) {
  require_valid(u1);
  require_valid(u2);
  const VertexSet c1 = forward_set(u1, env, window);
  const VertexSet c2 = forward_set(u2, env, window);
  const std::int64_t t0 = std::min(u1.t, u2.t);
  const JBand band = band_for_window(window);
  std::vector<BitRow> rows;
  for (std::int64_t t = t0; t <= window.t_max; ++t) {
    BitRow r(band);
    for (std::int64_t j = band.j_lo; j <= band.j_hi; ++j) {
      const Vertex v = from_j(j, t);
      if (c1.contains(v) != c2.contains(v)) r.set(j);
    }
    rows.push_back(std::move(r));
  }
  return VertexSet(t0, std::move(rows));
}

SymmDiffCounts symm_diff_level_counts(Vertex u1, Vertex u2,
                                      const Environment& env,
                                      std::int64_t N) {
  require_valid(u1);
  require_valid(u2);
  if (u1.t != u2.t)
    throw ContractError("fused difference sweep needs same-level origins");
  if (N < 0) throw ContractError("level count must be >= 0");
  const std::int64_t t0 = u1.t;
  require_coverage(env, Window{std::min(u1.x, u2.x) - N,
                               std::max(u1.x, u2.x) + N, t0, t0 + N});

  // Oriented steps never decrease j, so both clusters live in
  // [j1, j2 + dt] at dt levels up; fill only that prefix of the band.
  const std::int64_t j1 = std::min(to_j(u1), to_j(u2));
  const std::int64_t j2 = std::max(to_j(u1), to_j(u2));
  const JBand band{j1, j2 + N};
  BitRow a(band), b(band), left(band), right(band), na(band), nb(band);
  a.set(to_j(u1));
  b.set(to_j(u2));

  SymmDiffCounts out;
  out.level_counts.reserve(static_cast<std::size_t>(N) + 1);
  auto xor_count = [](const BitRow& r1, const BitRow& r2) {
    std::int64_t c = 0;
    for (std::size_t w = 0; w < r1.words(); ++w)
      c += std::popcount(r1.data()[w] ^ r2.data()[w]);
    return c;
  };
  out.level_counts.push_back(xor_count(a, b));
  for (std::int64_t dt = 0; dt < N; ++dt) {
    if (!a.any() && !b.any()) break;
    const std::int64_t t = t0 + dt;
    env.open_row(t, band.j_lo, j2 + dt, Side::LeftUp, left.data());
    env.open_row(t, band.j_lo, j2 + dt, Side::RightUp, right.data());
    step_up(a, left, right, na);
    step_up(b, left, right, nb);
    std::swap(a, na);
    std::swap(b, nb);
    out.level_counts.push_back(xor_count(a, b));
  }
  out.level_counts.resize(static_cast<std::size_t>(N) + 1, 0);
  out.alive1 = a.any();
  out.alive2 = b.any();
  return out;
}

}  // namespace operc
