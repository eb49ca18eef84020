#include "operc/genealogy.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <set>

#include "operc/errors.hpp"

namespace operc {

namespace {

constexpr std::int64_t kCoordCap = std::int64_t{1} << 30;

struct UnionFind {
  std::vector<std::int32_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i)
      parent[i] = static_cast<std::int32_t>(i);
  }
  std::int32_t find(std::int32_t a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      auto& p = parent[static_cast<std::size_t>(a)];
      p = parent[static_cast<std::size_t>(p)];
      a = p;
    }
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(a)] = b;
  }
};

}  // namespace

std::uint64_t Forest::key(Vertex v) {
  if (v.x < -kCoordCap || v.x >= kCoordCap || v.t < -kCoordCap ||
      v.t >= kCoordCap)
    throw ContractError("coordinate magnitude beyond 2^30");
  return (static_cast<std::uint64_t>(v.t + kCoordCap) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x));
}

std::int32_t Forest::find(Vertex v) const {
  auto it = index_.find(key(v));
  return it == index_.end() ? -1 : it->second;
}

std::int32_t Forest::require(Vertex v) const {
  std::int32_t i = find(v);
  if (i < 0)
    throw NotInForestError("vertex " + to_string(v) + " is not in the forest");
  return i;
}

Window Forest::safe_subwindow() const {
  return Window{window_.x_min + margin_, window_.x_max - margin_,
                window_.t_min + margin_, window_.t_max - margin_};
}

void Forest::derive_family(bool closed_world) {
  const std::size_t n = verts_.size();
  daughters_.assign(n, {-1, -1});
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t m = mother_[i];
    if (m < 0) continue;
    // A right-up step means the child sits left-below its mother: older.
    int slot = (mother_side_[i] == 1) ? 0 : 1;
    daughters_[static_cast<std::size_t>(m)][static_cast<std::size_t>(slot)] =
        static_cast<std::int32_t>(i);
  }

  sigma_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_side_[i]) continue;  // rank relative to the mother is unknown
    if (mother_side_[i] == 1) {
      sigma_[i] = 1;  // left-below its mother: older or only
      continue;
    }
    Vertex sister{verts_[i].x - 2, verts_[i].t};
    std::int32_t si = find(sister);
    if (si >= 0 && has_side_[static_cast<std::size_t>(si)] &&
        mother_side_[static_cast<std::size_t>(si)] == 1) {
      sigma_[i] = 2;  // the older sister is present
    } else if (closed_world || window_.contains(sister)) {
      sigma_[i] = 1;  // certified only daughter
    }  // else: sister slot is outside the window, rank undecidable
  }

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    if (mother_[i] >= 0) uf.unite(static_cast<std::int32_t>(i), mother_[i]);
  component_.assign(n, -1);
  std::vector<std::int32_t> label(n, -1);
  component_count_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t root = uf.find(static_cast<std::int32_t>(i));
    if (label[static_cast<std::size_t>(root)] < 0) {
      label[static_cast<std::size_t>(root)] = static_cast<std::int32_t>(i);
      ++component_count_;
    }
    component_[i] = label[static_cast<std::size_t>(root)];
  }
}

Forest Forest::from_links(
    const Window& window,
    const std::vector<std::pair<Vertex, Vertex>>& child_mother) {
  Forest f;
  f.window_ = window;
  f.N_ = 0;
  f.margin_ = 0;

  std::set<Vertex, VertexLevelOrder> all;
  for (const auto& [child, mother] : child_mother) {
    require_valid(child);
    require_valid(mother);
    if (!window.contains(child) || !window.contains(mother))
      throw ContractError("link endpoint outside the window");
    if (mother.t != child.t + 1 ||
        (mother.x != child.x - 1 && mother.x != child.x + 1))
      throw ContractError("mother must be one oriented step above the child");
    all.insert(child);
    all.insert(mother);
  }
  f.verts_.assign(all.begin(), all.end());
  for (std::size_t i = 0; i < f.verts_.size(); ++i)
    f.index_[key(f.verts_[i])] = static_cast<std::int32_t>(i);

  const std::size_t n = f.verts_.size();
  f.mother_.assign(n, -1);
  f.mother_side_.assign(n, 0);
  f.has_side_.assign(n, 0);
  f.mother_truncated_.assign(n, 0);
  f.daughters_complete_.assign(n, 1);
  for (const auto& [child, mother] : child_mother) {
    std::size_t ci = static_cast<std::size_t>(f.find(child));
    if (f.mother_[ci] >= 0)
      throw ContractError("vertex " + to_string(child) +
                          " is given two mothers");
    f.mother_[ci] = f.find(mother);
    f.mother_side_[ci] = (mother.x == child.x + 1) ? 1 : 0;
    f.has_side_[ci] = 1;
  }
  f.derive_family(/*closed_world=*/true);
  return f;
}

Forest build_forest(const Window& window, std::int64_t N,
                    const Environment& env, std::int64_t margin) {
  if (window.x_min > window.x_max || window.t_min > window.t_max)
    throw ContractError("empty window");
  if (N < 1) throw ContractError("horizon height must be at least 1");
  if (margin < 0) margin = N / 5;
  if (margin > N) throw ContractError("margin exceeds the horizon");

  Forest f;
  f.window_ = window;
  f.N_ = N;
  f.margin_ = margin;

  const std::int64_t H = window.t_max + N;
  JBand jw = band_for_window(window);
  JBand band{jw.j_lo, jw.j_hi + (H - window.t_min)};
  require_coverage(env, Window{2 * band.j_lo - H, 2 * band.j_hi - window.t_min,
                               window.t_min, H});
  std::vector<BitRow> rows = horizon_reach_rows(env, band, window.t_min, H);

  for (std::int64_t t = window.t_min; t <= window.t_max; ++t) {
    const BitRow& row = rows[static_cast<std::size_t>(t - window.t_min)];
    std::int64_t j_lo = (window.x_min + t + 1) >> 1;
    std::int64_t j_hi = (window.x_max + t) >> 1;
    for (std::int64_t j = j_lo; j <= j_hi; ++j)
      if (row.get(j)) f.verts_.push_back(from_j(j, t));
  }
  for (std::size_t i = 0; i < f.verts_.size(); ++i)
    f.index_[Forest::key(f.verts_[i])] = static_cast<std::int32_t>(i);

  const std::size_t n = f.verts_.size();
  f.mother_.assign(n, -1);
  f.mother_side_.assign(n, 0);
  f.has_side_.assign(n, 1);
  f.mother_truncated_.assign(n, 0);
  f.daughters_complete_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = f.verts_[i];
    const BitRow& next =
        rows[static_cast<std::size_t>(v.t + 1 - window.t_min)];
    const std::int64_t j = to_j(v);
    Vertex mv;
    if (env.is_open({v, Side::RightUp}) && next.get(j + 1)) {
      f.mother_side_[i] = 1;
      mv = {v.x + 1, v.t + 1};
    } else if (env.is_open({v, Side::LeftUp}) && next.get(j)) {
      f.mother_side_[i] = 0;
      mv = {v.x - 1, v.t + 1};
    } else {
      throw ContractError("horizon-reaching site has no horizon-reaching child");
    }
    if (window.contains(mv)) {
      f.mother_[i] = f.find(mv);
    } else {
      f.mother_truncated_[i] = 1;
    }
    f.daughters_complete_[i] =
        v.t - 1 >= window.t_min && window.contains({v.x - 1, v.t - 1}) &&
        window.contains({v.x + 1, v.t - 1});
  }
  f.derive_family(/*closed_world=*/false);
  return f;
}

KinshipRecord kinship(Vertex u, const Forest& f) {
  KinshipRecord rec;
  rec.mother = f.mother(u);
  rec.mother_truncated = f.mother_truncated(u);
  rec.daughters = f.daughters(u);
  rec.daughters_complete = f.daughters_complete(u);
  rec.sigma = f.sigma(u);
  return rec;
}

std::optional<Vertex> nth_mother(Vertex u, std::int64_t n, const Forest& f) {
  if (n < 0) throw ContractError("iteration count must be nonnegative");
  if (!f.contains(u))
    throw NotInForestError("vertex " + to_string(u) + " is not in the forest");
  Vertex cur = u;
  for (std::int64_t i = 0; i < n; ++i) {
    std::optional<Vertex> m = f.mother(cur);
    if (!m) return std::nullopt;
    cur = *m;
  }
  return cur;
}

bool precedes(Vertex u, Vertex v, const Forest& f) {
  std::int32_t cu = f.require(u), cv = f.require(v);
  if (cu == cv) return false;
  auto level = [&f](std::int32_t i) {
    return f.verts_[static_cast<std::size_t>(i)].t;
  };
  auto climb = [&f](std::int32_t& prev, std::int32_t& cur) {
    std::int32_t m = f.mother_[static_cast<std::size_t>(cur)];
    if (m < 0)
      throw UndecidableError(
          "ancestor chain leaves the window before a common ancestor");
    prev = cur;
    cur = m;
  };
  std::int32_t pu = -1, pv = -1;
  while (level(cu) < level(cv)) climb(pu, cu);
  while (level(cv) < level(cu)) climb(pv, cv);
  while (cu != cv) {
    climb(pu, cu);
    climb(pv, cv);
  }
  auto rank = [&f](std::int32_t prev) -> int {
    if (prev < 0) return 0;
    int s = f.sigma_[static_cast<std::size_t>(prev)];
    if (s == 0)
      throw UndecidableError("sister rank at the junction is undecided");
    return s;
  };
  return rank(pu) < rank(pv);
}

std::optional<Vertex> successor(Vertex u, const Forest& f) {
  std::int32_t i = f.require(u);
  const auto& d = f.daughters_[static_cast<std::size_t>(i)];
  if (d[0] >= 0) return f.verts_[static_cast<std::size_t>(d[0])];
  if (!f.daughters_complete_[static_cast<std::size_t>(i)]) return std::nullopt;
  if (d[1] >= 0) return f.verts_[static_cast<std::size_t>(d[1])];
  // Childless: the younger sister of the nearest ancestor that has one.
  std::int32_t w = i;
  while (true) {
    const std::size_t wi = static_cast<std::size_t>(w);
    if (!f.has_side_[wi]) return std::nullopt;
    if (f.mother_side_[wi] == 1) {
      Vertex sister{f.verts_[wi].x + 2, f.verts_[wi].t};
      if (!f.window_.contains(sister)) return std::nullopt;
      std::int32_t si = f.find(sister);
      if (si >= 0 && f.has_side_[static_cast<std::size_t>(si)] &&
          f.mother_side_[static_cast<std::size_t>(si)] == 0)
        return f.verts_[static_cast<std::size_t>(si)];
    }
    std::int32_t m = f.mother_[wi];
    if (m < 0) return std::nullopt;
    w = m;
  }
}

std::optional<Vertex> predecessor(Vertex u, const Forest& f) {
  std::int32_t i = f.require(u);
  int s = f.sigma_[static_cast<std::size_t>(i)];
  if (s == 0) return std::nullopt;
  if (s == 1) {
    std::int32_t m = f.mother_[static_cast<std::size_t>(i)];
    if (m < 0) return std::nullopt;
    return f.verts_[static_cast<std::size_t>(m)];
  }
  // Younger sister: youngest-descent leaf of the older sister.
  std::int32_t cur = f.find({u.x - 2, u.t});
  if (cur < 0) throw ContractError("recorded older sister is missing");
  while (true) {
    const auto& d = f.daughters_[static_cast<std::size_t>(cur)];
    if (d[1] >= 0) {
      cur = d[1];
      continue;
    }
    if (!f.daughters_complete_[static_cast<std::size_t>(cur)])
      return std::nullopt;
    if (d[0] >= 0) {
      cur = d[0];
      continue;
    }
    return f.verts_[static_cast<std::size_t>(cur)];
  }
}

std::vector<Vertex> succession_line(Vertex u, std::int64_t k, const Forest& f) {
  if (k < 0) throw ContractError("line radius must be nonnegative");
  if (!f.contains(u))
    throw NotInForestError("vertex " + to_string(u) + " is not in the forest");
  std::vector<Vertex> back;
  Vertex cur = u;
  for (std::int64_t i = 0; i < k; ++i) {
    std::optional<Vertex> p = predecessor(cur, f);
    if (!p) break;
    back.push_back(*p);
    cur = *p;
  }
  std::vector<Vertex> line(back.rbegin(), back.rend());
  line.push_back(u);
  cur = u;
  for (std::int64_t i = 0; i < k; ++i) {
    std::optional<Vertex> s = successor(cur, f);
    if (!s) break;
    line.push_back(*s);
    cur = *s;
  }
  std::set<Vertex> seen;
  for (const Vertex& v : line)
    if (!seen.insert(v).second)
      throw ContractError("succession line revisited " + to_string(v));
  return line;
}

BranchResult branch(Vertex u, const Forest& f) {
  if (!f.contains(u))
    throw NotInForestError("vertex " + to_string(u) + " is not in the forest");
  BranchResult out;
  std::vector<Vertex> stack{u};
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    out.members.push_back(v);
    if (!f.daughters_complete(v)) out.truncated = true;
    for (const Vertex& d : f.daughters(v)) stack.push_back(d);
  }
  std::sort(out.members.begin(), out.members.end(), VertexLevelOrder{});
  return out;
}

std::optional<Vertex> Forest::mother(Vertex u) const {
  std::int32_t i = require(u);
  std::int32_t m = mother_[static_cast<std::size_t>(i)];
  if (m < 0) return std::nullopt;
  return verts_[static_cast<std::size_t>(m)];
}

bool Forest::mother_truncated(Vertex u) const {
  return mother_truncated_[static_cast<std::size_t>(require(u))] != 0;
}

std::vector<Vertex> Forest::daughters(Vertex u) const {
  std::int32_t i = require(u);
  std::vector<Vertex> out;
  for (std::int32_t d : daughters_[static_cast<std::size_t>(i)])
    if (d >= 0) out.push_back(verts_[static_cast<std::size_t>(d)]);
  return out;
}

bool Forest::daughters_complete(Vertex u) const {
  return daughters_complete_[static_cast<std::size_t>(require(u))] != 0;
}

int Forest::sigma(Vertex u) const {
  return sigma_[static_cast<std::size_t>(require(u))];
}

std::int64_t Forest::component(Vertex u) const {
  return component_[static_cast<std::size_t>(require(u))];
}

std::vector<Vertex> Forest::component_members(std::int64_t label) const {
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < verts_.size(); ++i)
    if (component_[i] == label) out.push_back(verts_[i]);
  return out;
}

std::string Forest::dump() const {
  std::string out = "child_x,child_t,mother_x,mother_t,sigma\n";
  char buf[160];
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    std::int32_t m = mother_[i];
    if (m < 0) continue;
    const Vertex& c = verts_[i];
    const Vertex& mv = verts_[static_cast<std::size_t>(m)];
    std::snprintf(buf, sizeof(buf),
                  "%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64 ",%d\n", c.x,
                  c.t, mv.x, mv.t, static_cast<int>(sigma_[i]));
    out += buf;
  }
  return out;
}

}  // namespace operc
