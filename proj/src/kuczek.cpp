#include "operc/kuczek.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>

#include "operc/errors.hpp"

namespace operc {

std::vector<RightEdgePoint> right_edge_series(const Environment& env,
                                              std::int64_t N) {
  if (N < 0) throw ContractError("horizon height must be nonnegative");
  require_coverage(env, Window{-2 * N, N, 0, N});
  JBand band{-N, N};
  BitRow cur(band);
  for (std::int64_t j = -N; j <= 0; ++j) cur.set(j);

  std::vector<RightEdgePoint> out;
  out.reserve(static_cast<std::size_t>(N) + 1);
  BitRow left(band), right(band), next(band);
  for (std::int64_t n = 0; n <= N; ++n) {
    RightEdgePoint pt;
    pt.n = n;
    if (cur.any()) {
      std::int64_t x = 2 * cur.max_set() - n;
      pt.r = x;
      pt.truncation_affected = x < -N;
    } else {
      // Sites left of the -2N cut could keep the untruncated process alive.
      pt.truncation_affected = true;
    }
    out.push_back(pt);
    if (n == N || !cur.any()) continue;
    fill_open(env, band, n, Side::LeftUp, left);
    fill_open(env, band, n, Side::RightUp, right);
    step_up(cur, left, right, next);
    std::swap(cur, next);
  }
  // Extinction is permanent: pad levels skipped by the early exit above.
  while (static_cast<std::int64_t>(out.size()) <= N) {
    RightEdgePoint pt;
    pt.n = static_cast<std::int64_t>(out.size());
    pt.truncation_affected = true;
    out.push_back(pt);
  }
  return out;
}

BreakPointSeries::BreakPointSeries(Vertex origin, std::int64_t N,
                                   std::int64_t margin,
                                   std::vector<BreakRecord> records,
                                   std::vector<std::int64_t> r_prime,
                                   std::vector<bool> primed)
    : origin_(origin),
      N_(N),
      margin_(margin),
      records_(std::move(records)),
      r_prime_(std::move(r_prime)),
      primed_(std::move(primed)) {
  require_valid(origin_);
  if (N_ < 0 || margin_ < 0 || margin_ > N_)
    throw ContractError("need 0 <= margin <= N");
  if (r_prime_.size() != static_cast<std::size_t>(N_) + 1 ||
      primed_.size() != r_prime_.size())
    throw ContractError("right-edge track must cover levels 0..N");
  std::int64_t prev_T = 0;
  for (const BreakRecord& rec : records_) {
    if (rec.tau < 1) throw ContractError("holding time below 1");
    if (rec.T != prev_T + rec.tau)
      throw ContractError("break levels do not accumulate the holding times");
    if (rec.X > rec.tau || rec.X < -rec.tau)
      throw ContractError("column increment outside the light cone");
    if (((rec.X ^ rec.tau) & 1) != 0)
      throw ContractError("column increment parity mismatch");
    if (rec.T > N_ - margin_)
      throw ContractError("record certified above the margin cutoff");
    prev_T = rec.T;
  }
}

std::int64_t BreakPointSeries::r_prime(std::int64_t n) const {
  if (n < 0 || n > N_) throw ContractError("level offset outside 0..N");
  return r_prime_[static_cast<std::size_t>(n)];
}

bool BreakPointSeries::primed(std::int64_t n) const {
  if (n < 0 || n > N_) throw ContractError("level offset outside 0..N");
  return primed_[static_cast<std::size_t>(n)];
}

std::optional<std::int64_t> BreakPointSeries::r(std::int64_t n) const {
  if (primed(n)) return std::nullopt;
  return r_prime(n);
}

std::string BreakPointSeries::to_csv() const {
  std::string out = "m,T,X,tau\n";
  char buf[128];
  for (std::size_t m = 0; m < records_.size(); ++m) {
    std::snprintf(buf, sizeof(buf),
                  "%zu,%" PRId64 ",%" PRId64 ",%" PRId64 "\n", m + 1,
                  records_[m].T, records_[m].X, records_[m].tau);
    out += buf;
  }
  return out;
}

BreakPointSeries break_points(Vertex u, const Environment& env,
                              std::int64_t N, std::int64_t margin) {
  require_valid(u);
  if (N < 0 || margin < 0 || margin > N)
    throw ContractError("need 0 <= margin <= N");
  require_coverage(env, cone_window(u, Direction::Forward, N));
  const std::int64_t j0 = to_j(u);
  JBand band{j0, j0 + N};
  std::vector<BitRow> reach = horizon_reach_rows(env, band, u.t, u.t + N);
  if (!reach.front().get(j0))
    throw NoPathError("site does not reach the horizon");

  std::vector<std::int64_t> r_prime(static_cast<std::size_t>(N) + 1);
  std::vector<bool> primed(static_cast<std::size_t>(N) + 1, false);
  r_prime[0] = u.x;
  BitRow cur(band), left(band), right(band), next(band);
  cur.set(j0);
  for (std::int64_t n = 1; n <= N; ++n) {
    std::int64_t t = u.t + n - 1;
    fill_open(env, band, t, Side::LeftUp, left);
    fill_open(env, band, t, Side::RightUp, right);
    step_up(cur, left, right, next);
    std::swap(cur, next);
    if (!cur.any()) {
      // Extinct frontier restarts from the phantom all-right position.
      cur.set(j0 + n);
      primed[static_cast<std::size_t>(n)] = true;
    }
    r_prime[static_cast<std::size_t>(n)] = 2 * cur.max_set() - (u.t + n);
  }

  std::vector<BreakRecord> records;
  std::int64_t prev_T = 0;
  for (std::int64_t n = 1; n <= N - margin; ++n) {
    std::int64_t col = r_prime[static_cast<std::size_t>(n)];
    std::int64_t jr = to_j({col, u.t + n});
    if (!reach[static_cast<std::size_t>(n)].get(jr)) continue;
    records.push_back({n, col - r_prime[static_cast<std::size_t>(prev_T)],
                       n - prev_T});
    prev_T = n;
  }
  return BreakPointSeries(u, N, margin, std::move(records),
                          std::move(r_prime), std::move(primed));
}

WalkPath::WalkPath(Vertex origin, std::int64_t N, std::int64_t margin,
                   std::vector<WalkJump> jumps)
    : origin_(origin), N_(N), margin_(margin), jumps_(std::move(jumps)) {
  require_valid(origin_);
  std::int64_t prev = 0;
  for (const WalkJump& j : jumps_) {
    if (j.level <= prev)
      throw ContractError("jump levels must strictly increase");
    prev = j.level;
  }
}

std::int64_t WalkPath::position_at(std::int64_t level) const {
  if (level < 0 || level > N_)
    throw ContractError("level offset outside 0..N");
  std::int64_t pos = 0;
  for (const WalkJump& j : jumps_) {
    if (j.level > level) break;
    pos = j.col;
  }
  return pos;
}

std::optional<std::int64_t> WalkPath::jump_at(std::int64_t level) const {
  for (const WalkJump& j : jumps_) {
    if (j.level == level) return j.col;
    if (j.level > level) break;
  }
  return std::nullopt;
}

std::string WalkPath::to_csv() const {
  std::string out = "level,column\n";
  char buf[96];
  for (const WalkJump& j : jumps_) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%" PRId64 "\n", j.level,
                  j.col);
    out += buf;
  }
  return out;
}

WalkPath walk(Vertex u, const Environment& env, std::int64_t N,
              std::int64_t margin) {
  BreakPointSeries series = break_points(u, env, N, margin);
  std::vector<WalkJump> jumps;
  jumps.reserve(series.records().size());
  std::int64_t pos = 0;
  for (const BreakRecord& rec : series.records()) {
    pos += rec.X;
    jumps.push_back({rec.T, pos});
  }
  return WalkPath(u, N, margin, std::move(jumps));
}

std::optional<Vertex> walks_meet(Vertex u1, Vertex u2, const Environment& env,
                                 std::int64_t N, std::int64_t margin) {
  if (N < 0 || margin < 0 || margin > N)
    throw ContractError("need 0 <= margin <= N");
  std::int64_t H = std::max(u1.t, u2.t) + N;
  WalkPath w1 = walk(u1, env, H - u1.t, margin);
  WalkPath w2 = walk(u2, env, H - u2.t, margin);
  const std::vector<WalkJump>& a = w1.jumps();
  const std::vector<WalkJump>& b = w2.jumps();
  std::size_t i = 0, k = 0;
  while (i < a.size() && k < b.size()) {
    std::int64_t la = u1.t + a[i].level, lb = u2.t + b[k].level;
    if (la < lb) {
      ++i;
    } else if (lb < la) {
      ++k;
    } else {
      std::int64_t ca = u1.x + a[i].col, cb = u2.x + b[k].col;
      if (ca == cb) return Vertex{ca, la};
      ++i;
      ++k;
    }
  }
  return std::nullopt;
}

std::optional<Vertex> paths_meet(Vertex u1, Vertex u2, const Environment& env,
                                 std::int64_t N, std::int64_t margin,
                                 ExtremalKind kind1, ExtremalKind kind2) {
  if (N < 0 || margin < 0 || margin > N)
    throw ContractError("need 0 <= margin <= N");
  std::int64_t H = std::max(u1.t, u2.t) + N;
  auto extract = [&](Vertex u, ExtremalKind kind) {
    return kind == ExtremalKind::Rightmost
               ? rightmost_path(u, H - u.t, env)
               : leftmost_path(u, H - u.t, env);
  };
  std::vector<Vertex> p1 = extract(u1, kind1).vertices();
  std::vector<Vertex> p2 = extract(u2, kind2).vertices();
  for (std::int64_t t = std::max(u1.t, u2.t); t <= H - margin; ++t) {
    Vertex a = p1[static_cast<std::size_t>(t - u1.t)];
    Vertex b = p2[static_cast<std::size_t>(t - u2.t)];
    if (a == b) return a;
  }
  return std::nullopt;
}

std::vector<Vertex> crossing_points(const PathRec& path, double alpha) {
  if (!(alpha > 0)) throw ContractError("slope must be positive");
  std::vector<Vertex> verts = path.vertices();
  std::vector<Vertex> out;
  auto offset = [alpha](Vertex v) {
    return static_cast<double>(v.x) - alpha * static_cast<double>(v.t);
  };
  for (std::size_t i = 1; i < verts.size(); ++i) {
    double s0 = offset(verts[i - 1]), s1 = offset(verts[i]);
    if ((s0 <= 0 && s1 >= 0) || (s0 >= 0 && s1 <= 0)) out.push_back(verts[i]);
  }
  return out;
}

}  // namespace operc
