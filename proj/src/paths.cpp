#include "operc/paths.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <deque>
#include <set>

#include "operc/errors.hpp"

namespace operc {

std::vector<Vertex> PathRec::vertices() const {
  std::vector<Vertex> out;
  out.reserve(steps.size() + 1);
  Vertex v = origin;
  out.push_back(v);
  for (Side s : steps) {
    std::int64_t dx = (s == Side::RightUp) ? 1 : -1;
    v = anti ? Vertex{v.x + dx, v.t - 1} : Vertex{v.x + dx, v.t + 1};
    out.push_back(v);
  }
  return out;
}

Vertex PathRec::vertex_at(std::int64_t t) const {
  if (t < level_lo() || t > level_hi())
    throw NotOnPathError("level " + std::to_string(t) + " outside path range");
  std::int64_t idx = anti ? origin.t - t : t - origin.t;
  Vertex v = origin;
  for (std::int64_t i = 0; i < idx; ++i) {
    std::int64_t dx = (steps[static_cast<std::size_t>(i)] == Side::RightUp) ? 1 : -1;
    v = anti ? Vertex{v.x + dx, v.t - 1} : Vertex{v.x + dx, v.t + 1};
  }
  return v;
}

std::string PathRec::serialize() const {
  char head[96];
  std::snprintf(head, sizeof(head), "origin %" PRId64 ",%" PRId64 "; %ssteps ",
                origin.x, origin.t, anti ? "anti-" : "");
  std::string out(head);
  if (steps.empty()) {
    out += '-';
  } else {
    for (Side s : steps) out += side_char(s);
  }
  return out;
}

PathRec PathRec::parse(const std::string& s, long line) {
  long long x = 0, t = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "origin %lld ,%lld ;%n", &x, &t, &consumed) != 2)
    throw ParseError(line, "expected 'origin x,t; steps ...': " + s);
  std::string rest = s.substr(static_cast<std::size_t>(consumed));
  std::size_t pos = rest.find_first_not_of(' ');
  if (pos == std::string::npos) throw ParseError(line, "missing steps clause");
  rest = rest.substr(pos);
  PathRec rec;
  rec.origin = {x, t};
  constexpr const char* kAnti = "anti-steps ";
  constexpr const char* kFwd = "steps ";
  if (rest.rfind(kAnti, 0) == 0) {
    rec.anti = true;
    rest = rest.substr(std::string(kAnti).size());
  } else if (rest.rfind(kFwd, 0) == 0) {
    rest = rest.substr(std::string(kFwd).size());
  } else {
    throw ParseError(line, "expected steps clause, got: " + rest);
  }
  while (!rest.empty() && (rest.back() == '\n' || rest.back() == '\r' ||
                           rest.back() == ' '))
    rest.pop_back();
  if (rest == "-") rest.clear();
  for (char c : rest) {
    if (c == 'R')
      rec.steps.push_back(Side::RightUp);
    else if (c == 'L')
      rec.steps.push_back(Side::LeftUp);
    else
      throw ParseError(line, std::string("bad step letter '") + c + "'");
  }
  require_valid(rec.origin);
  return rec;
}

namespace {

// Greedy climb from (j0, t0) to t1 along rows of horizon-reaching sites.
// Prefers the right child when it is open and still horizon-reaching;
// mirrored preference when prefer_right is false. rows[i] is level t0 + i.
std::vector<Side> greedy_climb(const Environment& env,
                               const std::vector<BitRow>& rows,
                               std::int64_t j0, std::int64_t t0,
                               std::int64_t t1, bool prefer_right) {
  std::vector<Side> steps;
  steps.reserve(static_cast<std::size_t>(t1 - t0));
  std::int64_t j = j0;
  for (std::int64_t t = t0; t < t1; ++t) {
    const BitRow& next = rows[static_cast<std::size_t>(t - t0 + 1)];
    Vertex from = from_j(j, t);
    Side order[2] = {prefer_right ? Side::RightUp : Side::LeftUp,
                     prefer_right ? Side::LeftUp : Side::RightUp};
    bool moved = false;
    for (Side s : order) {
      std::int64_t jn = (s == Side::RightUp) ? j + 1 : j;
      if (env.is_open({from, s}) && next.get(jn)) {
        steps.push_back(s);
        j = jn;
        moved = true;
        break;
      }
    }
    if (!moved)
      throw ContractError("horizon-reaching site has no horizon-reaching child");
  }
  return steps;
}

PathRec extremal_path(Vertex u, std::int64_t n, const Environment& env,
                      bool prefer_right) {
  require_valid(u);
  if (n < 0) throw ContractError("horizon height must be nonnegative");
  require_coverage(env, cone_window(u, Direction::Forward, n));
  std::int64_t j0 = to_j(u);
  JBand band{j0, j0 + n};
  std::vector<BitRow> rows = horizon_reach_rows(env, band, u.t, u.t + n);
  if (!rows.front().get(j0))
    throw NoPathError("site does not reach the horizon");
  PathRec rec;
  rec.origin = u;
  rec.steps = greedy_climb(env, rows, j0, u.t, u.t + n, prefer_right);
  return rec;
}

}  // namespace

PathRec rightmost_path(Vertex u, std::int64_t N, const Environment& env) {
  return extremal_path(u, N, env, /*prefer_right=*/true);
}

PathRec leftmost_path(Vertex u, std::int64_t N, const Environment& env) {
  return extremal_path(u, N, env, /*prefer_right=*/false);
}

PathRec anti_leftmost_path(Vertex u, std::int64_t depth,
                           const Environment& env) {
  require_valid(u);
  if (depth < 0) throw ContractError("depth must be nonnegative");
  require_coverage(env, cone_window(u, Direction::Backward, depth));
  std::int64_t j0 = to_j(u);
  std::int64_t t_lo = u.t - depth;
  JBand band{j0 - depth, j0};

  // rows[i] at level t_lo + i: sites reached from the full bottom row, so a
  // site is marked iff some anti path from it spans the remaining depth.
  std::vector<BitRow> rows;
  rows.reserve(static_cast<std::size_t>(depth) + 1);
  BitRow full(band);
  for (std::int64_t j = band.j_lo; j <= band.j_hi; ++j) full.set(j);
  rows.push_back(full);
  BitRow left(band), right(band);
  for (std::int64_t t = t_lo; t < u.t; ++t) {
    fill_open(env, band, t, Side::LeftUp, left);
    fill_open(env, band, t, Side::RightUp, right);
    BitRow next(band);
    step_up(rows.back(), left, right, next);
    rows.push_back(std::move(next));
  }
  if (!rows.back().get(j0))
    throw NoPathError("site is not reached across the requested depth");

  PathRec rec;
  rec.origin = u;
  rec.anti = true;
  std::int64_t j = j0;
  for (std::int64_t t = u.t; t > t_lo; --t) {
    const BitRow& below = rows[static_cast<std::size_t>(t - 1 - t_lo)];
    // Left parent (j-1) reaches this site through its right-up edge.
    bool moved = false;
    struct Cand {
      Side step;
      std::int64_t jp;
      Side edge;
    } order[2] = {{Side::LeftUp, j - 1, Side::RightUp},
                  {Side::RightUp, j, Side::LeftUp}};
    for (const Cand& c : order) {
      if (below.get(c.jp) &&
          env.is_open({from_j(c.jp, t - 1), c.edge})) {
        rec.steps.push_back(c.step);
        j = c.jp;
        moved = true;
        break;
      }
    }
    if (!moved)
      throw ContractError("reached site has no reached parent");
  }
  return rec;
}

namespace {

std::vector<EdgeRef> path_edges(const PathRec& path) {
  std::vector<EdgeRef> edges;
  std::vector<Vertex> verts = path.vertices();
  edges.reserve(path.steps.size());
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (!path.anti) {
      edges.push_back({verts[i], path.steps[i]});
    } else {
      // Descending step to the left parent means the edge rises rightward.
      Side edge = (path.steps[i] == Side::LeftUp) ? Side::RightUp : Side::LeftUp;
      edges.push_back({verts[i + 1], edge});
    }
  }
  return edges;
}

}  // namespace

std::vector<Vertex> buds(Vertex v, const PathRec& path, PathSide side,
                         const Environment& env, const Window& window) {
  require_valid(v);
  std::vector<Vertex> verts = path.vertices();
  if (std::find(verts.begin(), verts.end(), v) == verts.end())
    throw NotOnPathError("seed vertex is not on the path");
  if (!window.contains(v))
    throw OutOfWindowError("seed vertex outside the window");

  std::int64_t lo = path.level_lo(), hi = path.level_hi();
  std::vector<std::int64_t> col(static_cast<std::size_t>(hi - lo) + 1);
  for (const Vertex& w : verts) col[static_cast<std::size_t>(w.t - lo)] = w.x;

  std::set<std::pair<Vertex, Side>> blocked;
  for (const EdgeRef& e : path_edges(path)) blocked.insert({e.from, e.side});

  std::int64_t t_cap = std::min(hi, window.t_max);
  std::set<Vertex> seen{v};
  std::deque<Vertex> queue{v};
  std::vector<Vertex> out;
  while (!queue.empty()) {
    Vertex w = queue.front();
    queue.pop_front();
    if (w.t >= t_cap) continue;
    for (Side s : {Side::LeftUp, Side::RightUp}) {
      EdgeRef e{w, s};
      Vertex target = e.target();
      if (!window.contains(target) || blocked.count({w, s}) || seen.count(target))
        continue;
      if (!env.is_open(e)) continue;
      seen.insert(target);
      queue.push_back(target);
      std::int64_t on_path_x = col[static_cast<std::size_t>(target.t - lo)];
      bool keep = (side == PathSide::Right) ? target.x > on_path_x
                                            : target.x < on_path_x;
      if (keep) out.push_back(target);
    }
  }
  std::sort(out.begin(), out.end(), VertexLevelOrder{});
  return out;
}

std::vector<Vertex> side_cluster(const PathRec& path, Vertex a, Vertex b,
                                 PathSide side, const Environment& env,
                                 const Window& window) {
  std::vector<Vertex> verts = path.vertices();
  auto ia = std::find(verts.begin(), verts.end(), a);
  auto ib = std::find(verts.begin(), verts.end(), b);
  if (ia == verts.end() || ib == verts.end())
    throw ContractError("piece endpoint is not on the path");
  if (ia > ib) throw ContractError("piece endpoints given against path order");
  std::set<Vertex> acc;
  for (auto it = ia; it != ib; ++it) {
    std::vector<Vertex> part = buds(*it, path, side, env, window);
    acc.insert(part.begin(), part.end());
  }
  std::vector<Vertex> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), VertexLevelOrder{});
  return out;
}

std::int64_t stabilization_prefix(Vertex u, const Environment& env,
                                  std::int64_t n1, std::int64_t n2) {
  if (n1 < 0 || n1 > n2)
    throw ContractError("horizon heights must satisfy 0 <= n1 <= n2");
  PathRec p1 = rightmost_path(u, n1, env);
  PathRec p2 = rightmost_path(u, n2, env);
  std::int64_t h = 0;
  while (h < n1 && p1.steps[static_cast<std::size_t>(h)] ==
                       p2.steps[static_cast<std::size_t>(h)])
    ++h;
  return h;
}

std::vector<std::optional<PathRec>> rightmost_paths_to_horizon(
    std::span<const Vertex> origins, std::int64_t horizon,
    const Environment& env) {
  std::vector<std::optional<PathRec>> out(origins.size());
  if (origins.empty()) return out;
  std::int64_t t0 = origins.front().t;
  std::int64_t j_min = to_j(origins.front()), j_max = j_min;
  for (const Vertex& u : origins) {
    require_valid(u);
    if (u.t != t0)
      throw ContractError("batched origins must share one level");
    j_min = std::min(j_min, to_j(u));
    j_max = std::max(j_max, to_j(u));
  }
  if (horizon < t0) throw ContractError("horizon below the origins");
  std::int64_t n = horizon - t0;
  Window needed{from_j(j_min, t0).x - n, from_j(j_max, t0).x + n, t0, horizon};
  require_coverage(env, needed);
  JBand band{j_min, j_max + n};
  std::vector<BitRow> rows = horizon_reach_rows(env, band, t0, horizon);
  for (std::size_t i = 0; i < origins.size(); ++i) {
    std::int64_t j0 = to_j(origins[i]);
    if (!rows.front().get(j0)) continue;
    PathRec rec;
    rec.origin = origins[i];
    rec.steps = greedy_climb(env, rows, j0, t0, horizon, /*prefer_right=*/true);
    out[i] = std::move(rec);
  }
  return out;
}

}  // namespace operc
