#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "operc/env.hpp"
#include "operc/paths.hpp"
#include "operc/reach.hpp"
#include "oracle.hpp"

using namespace operc;

namespace {

ExplicitConfig six_edge_fixture() {
  ExplicitConfig cfg(Window{-2, 2, 0, 2});
  cfg.set_open({{0, 0}, Side::LeftUp}, true);
  cfg.set_open({{0, 0}, Side::RightUp}, true);
  cfg.set_open({{-1, 1}, Side::RightUp}, true);
  return cfg;
}

// All edges of the two-level cone of the origin, in mask order.
std::vector<EdgeRef> cone_edges_two_levels() {
  return {{{0, 0}, Side::LeftUp},  {{0, 0}, Side::RightUp},
          {{-1, 1}, Side::LeftUp}, {{-1, 1}, Side::RightUp},
          {{1, 1}, Side::LeftUp},  {{1, 1}, Side::RightUp}};
}

PathRec path_from_steps(Vertex origin, const std::vector<Side>& steps) {
  return PathRec{origin, false, steps};
}

}  // namespace

TEST_CASE("path record geometry") {
  PathRec p{{0, 0}, false, {Side::RightUp, Side::RightUp, Side::LeftUp}};
  CHECK(p.length() == 3);
  CHECK(p.level_lo() == 0);
  CHECK(p.level_hi() == 3);
  CHECK(p.vertices() ==
        std::vector<Vertex>{{0, 0}, {1, 1}, {2, 2}, {1, 3}});
  CHECK(p.vertex_at(2) == Vertex{2, 2});
  CHECK(p.column_at(3) == 1);
  CHECK_THROWS_AS(p.vertex_at(4), NotOnPathError);
  CHECK_THROWS_AS(p.vertex_at(-1), NotOnPathError);

  PathRec a{{0, 4}, true, {Side::LeftUp, Side::RightUp}};
  CHECK(a.level_lo() == 2);
  CHECK(a.level_hi() == 4);
  // Anti steps descend: L to the left parent, R to the right parent.
  CHECK(a.vertices() == std::vector<Vertex>{{0, 4}, {-1, 3}, {0, 2}});
  CHECK(a.vertex_at(3) == Vertex{-1, 3});
}

TEST_CASE("path serialization round trips") {
  PathRec p{{-3, 5}, false, {Side::RightUp, Side::LeftUp}};
  CHECK(p.serialize() == "origin -3,5; steps RL");
  CHECK(PathRec::parse(p.serialize()) == p);

  PathRec a{{2, 0}, true, {Side::LeftUp}};
  CHECK(a.serialize() == "origin 2,0; anti-steps L");
  CHECK(PathRec::parse(a.serialize()) == a);

  PathRec empty{{4, 2}, false, {}};
  CHECK(empty.serialize() == "origin 4,2; steps -");
  CHECK(PathRec::parse(empty.serialize()) == empty);

  CHECK_THROWS_AS(PathRec::parse("nonsense"), ParseError);
  CHECK_THROWS_AS(PathRec::parse("origin 0,0; steps RQ"), ParseError);
  CHECK_THROWS_AS(PathRec::parse("origin 1,0; steps R"), InvalidVertexError);
  try {
    PathRec::parse("origin 0,0; hops RL", 12);
    CHECK(false);
  } catch (const ParseError& err) {
    CHECK(err.line == 12);
  }
}

TEST_CASE("extremal paths on the six edge fixture") {
  ExplicitConfig cfg = six_edge_fixture();
  PathRec right = rightmost_path({0, 0}, 2, cfg);
  // Only one route reaches level 2: left to (-1,1) then right to (0,2).
  CHECK(right.vertices() == std::vector<Vertex>{{0, 0}, {-1, 1}, {0, 2}});
  CHECK(leftmost_path({0, 0}, 2, cfg) == right);
  CHECK_THROWS_AS(rightmost_path({1, 1}, 1, cfg), NoPathError);
}

TEST_CASE("full density extremal paths hug the cone") {
  EdgeConfig env(1.0, 3);
  PathRec right = rightmost_path({0, 0}, 5, env);
  CHECK(right.steps == std::vector<Side>(5, Side::RightUp));
  PathRec left = leftmost_path({0, 0}, 5, env);
  CHECK(left.steps == std::vector<Side>(5, Side::LeftUp));
  PathRec anti = anti_leftmost_path({0, 6}, 4, env);
  CHECK(anti.anti);
  CHECK(anti.vertices().back() == Vertex{-4, 2});
}

TEST_CASE("extremal paths match brute force enumeration") {
  const auto edges = cone_edges_two_levels();
  Window w{-2, 2, 0, 2};
  int reachable = 0;
  for (unsigned mask = 0; mask < 64; ++mask) {
    ExplicitConfig cfg(w);
    for (std::size_t i = 0; i < edges.size(); ++i)
      cfg.set_open(edges[i], (mask >> i) & 1u);
    auto want_r = oracle::rightmost({0, 0}, 2, cfg, w);
    auto want_l = oracle::leftmost({0, 0}, 2, cfg, w);
    if (!want_r) {
      CHECK_THROWS_AS(rightmost_path({0, 0}, 2, cfg), NoPathError);
      continue;
    }
    ++reachable;
    CHECK(rightmost_path({0, 0}, 2, cfg).steps == *want_r);
    CHECK(leftmost_path({0, 0}, 2, cfg).steps == *want_l);
  }
  CHECK(reachable == 39);
}

TEST_CASE("sampled three level windows agree with brute force") {
  // Wide enough to hold the forward cone of (0,0) and the backward cone
  // of (1,3), so the window-free library calls see the same
  // configurations the oracle enumerates.
  Window w{-4, 4, 0, 3};
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    ExplicitConfig cfg = snapshot(EdgeConfig(0.55, seed), w);
    auto want_r = oracle::rightmost({0, 0}, 3, cfg, w);
    auto want_a = oracle::anti_leftmost({1, 3}, 3, cfg, w);
    if (want_r)
      CHECK(rightmost_path({0, 0}, 3, cfg).steps == *want_r);
    else
      CHECK_THROWS_AS(rightmost_path({0, 0}, 3, cfg), NoPathError);
    if (want_a)
      CHECK(anti_leftmost_path({1, 3}, 3, cfg).steps == *want_a);
    else
      CHECK_THROWS_AS(anti_leftmost_path({1, 3}, 3, cfg), NoPathError);
  }
}

TEST_CASE("rightmost path dominates every reaching cluster site") {
  const std::int64_t N = 60;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    EdgeConfig env(0.8, seed);
    if (!percolates_to({0, 0}, N, env)) continue;
    ++checked;
    PathRec gamma = rightmost_path({0, 0}, N, env);
    JBand band{0, N};
    auto reach = horizon_reach_rows(env, band, 0, N);
    VertexSet cl = cluster({0, 0}, env, cone_window({0, 0}, Direction::Forward, N));
    for (std::int64_t n = 0; n <= N; ++n) {
      const BitRow* row = cl.row(n);
      REQUIRE(row != nullptr);
      for (std::int64_t j = band.j_lo; j <= band.j_hi; ++j) {
        if (!row->get(j) || !reach[static_cast<std::size_t>(n)].get(j))
          continue;
        CHECK(2 * j - n <= gamma.column_at(n));
      }
    }
  }
  CHECK(checked >= 15);
}

TEST_CASE("leftmost is the mirror of rightmost") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    EdgeConfig env(0.8, seed);
    MirrorConfig mir(env);
    if (!percolates_to({0, 0}, 40, env)) continue;
    PathRec left = leftmost_path({0, 0}, 40, env);
    PathRec right_m = rightmost_path({0, 0}, 40, mir);
    auto lv = left.vertices();
    auto rv = right_m.vertices();
    REQUIRE(lv.size() == rv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) {
      CHECK(lv[i].x == -rv[i].x);
      CHECK(lv[i].t == rv[i].t);
    }
  }
}

TEST_CASE("buds on the six edge fixture") {
  ExplicitConfig cfg = six_edge_fixture();
  Window w{-2, 2, 0, 2};
  PathRec gamma = rightmost_path({0, 0}, 2, cfg);
  // The only off-path open growth is (0,0)->(1,1), right of the path.
  CHECK(buds({0, 0}, gamma, PathSide::Right, cfg, w) ==
        std::vector<Vertex>{{1, 1}});
  CHECK(buds({0, 0}, gamma, PathSide::Left, cfg, w).empty());
  CHECK(buds({-1, 1}, gamma, PathSide::Right, cfg, w).empty());
  CHECK_THROWS_AS(buds({1, 1}, gamma, PathSide::Right, cfg, w),
                  NotOnPathError);
  CHECK_THROWS_AS(buds({0, 0}, gamma, PathSide::Right, cfg,
                       Window{4, 8, 0, 2}),
                  OutOfWindowError);
}

TEST_CASE("buds match brute force on sampled configurations") {
  Window w{-3, 3, 0, 3};  // exact cone of the origin
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    ExplicitConfig cfg = snapshot(EdgeConfig(0.6, seed), w);
    auto want = oracle::rightmost({0, 0}, 3, cfg, w);
    if (!want) continue;
    PathRec gamma = path_from_steps({0, 0}, *want);
    for (const Vertex& v : gamma.vertices())
      for (PathSide side : {PathSide::Left, PathSide::Right})
        CHECK(buds(v, gamma, side, cfg, w) ==
              oracle::buds(v, gamma, side, cfg, w));
  }
}

TEST_CASE("full density rightmost path has no right buds") {
  EdgeConfig env(1.0, 9);
  Window w = cone_window({0, 0}, Direction::Forward, 6);
  PathRec gamma = rightmost_path({0, 0}, 6, env);
  for (const Vertex& v : gamma.vertices())
    CHECK(buds(v, gamma, PathSide::Right, env, w).empty());
  // Left buds exist in abundance.
  CHECK_FALSE(buds({0, 0}, gamma, PathSide::Left, env, w).empty());
}

TEST_CASE("side cluster unions bud sets over a piece") {
  Window w{-3, 3, 0, 3};
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ExplicitConfig cfg = snapshot(EdgeConfig(0.6, seed), w);
    auto want = oracle::rightmost({0, 0}, 3, cfg, w);
    if (!want) continue;
    PathRec gamma = path_from_steps({0, 0}, *want);
    auto verts = gamma.vertices();
    Vertex a = verts.front(), b = verts.back();
    for (PathSide side : {PathSide::Left, PathSide::Right}) {
      std::set<Vertex> expect;
      for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        auto part = oracle::buds(verts[i], gamma, side, cfg, w);
        expect.insert(part.begin(), part.end());
      }
      std::vector<Vertex> want_vec(expect.begin(), expect.end());
      std::sort(want_vec.begin(), want_vec.end(), VertexLevelOrder{});
      CHECK(side_cluster(gamma, a, b, side, cfg, w) == want_vec);
    }
  }
}

TEST_CASE("side cluster validates its piece") {
  ExplicitConfig cfg = six_edge_fixture();
  Window w{-2, 2, 0, 2};
  PathRec gamma = rightmost_path({0, 0}, 2, cfg);
  CHECK_THROWS_AS(side_cluster(gamma, {0, 2}, {0, 0}, PathSide::Right, cfg, w),
                  ContractError);
  CHECK_THROWS_AS(side_cluster(gamma, {2, 2}, {0, 2}, PathSide::Right, cfg, w),
                  ContractError);
  // Empty piece: nothing planted.
  CHECK(side_cluster(gamma, {0, 0}, {0, 0}, PathSide::Right, cfg, w).empty());
}

TEST_CASE("right side of a rightmost path never reaches the horizon") {
  // Any right bud that reached the horizon would beat the path's
  // extremality, so none may. Checked on surviving configurations.
  const std::int64_t N = 120, margin = 30;
  int configs = 0, buds_total = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    EdgeConfig env(0.8, seed);
    if (!percolates_to({0, 0}, N, env)) continue;
    ++configs;
    PathRec gamma = rightmost_path({0, 0}, N, env);
    Window w = cone_window({0, 0}, Direction::Forward, N);
    Vertex a = gamma.vertices().front();
    Vertex b = gamma.vertex_at(N - margin);
    for (const Vertex& bud :
         side_cluster(gamma, a, b, PathSide::Right, env, w)) {
      ++buds_total;
      CHECK_FALSE(percolates_to(bud, N - bud.t, env));
    }
  }
  CHECK(configs >= 30);
  CHECK(buds_total > 0);
}

TEST_CASE("stabilization prefix basics") {
  EdgeConfig full(1.0, 2);
  CHECK(stabilization_prefix({0, 0}, full, 12, 30) == 12);
  CHECK(stabilization_prefix({0, 0}, full, 7, 7) == 7);
  CHECK_THROWS_AS(stabilization_prefix({0, 0}, full, 9, 4), ContractError);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    EdgeConfig env(0.8, seed);
    if (!percolates_to({0, 0}, 80, env)) continue;
    std::int64_t h = stabilization_prefix({0, 0}, env, 40, 80);
    CHECK(h >= 0);
    CHECK(h <= 40);
    PathRec p1 = rightmost_path({0, 0}, 40, env);
    PathRec p2 = rightmost_path({0, 0}, 80, env);
    std::int64_t manual = 0;
    while (manual < 40 &&
           p1.steps[static_cast<std::size_t>(manual)] ==
               p2.steps[static_cast<std::size_t>(manual)])
      ++manual;
    CHECK(h == manual);
  }
}

TEST_CASE("batched rightmost paths match single calls") {
  std::vector<Vertex> origins{{-2, 0}, {0, 0}, {2, 0}};
  const std::int64_t horizon = 50;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EdgeConfig env(0.8, seed);
    auto batch = rightmost_paths_to_horizon(origins, horizon, env);
    REQUIRE(batch.size() == origins.size());
    for (std::size_t i = 0; i < origins.size(); ++i) {
      if (percolates_to(origins[i], horizon, env)) {
        REQUIRE(batch[i].has_value());
        CHECK(*batch[i] == rightmost_path(origins[i], horizon, env));
      } else {
        CHECK_FALSE(batch[i].has_value());
      }
    }
  }
  std::vector<Vertex> mixed{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(rightmost_paths_to_horizon(mixed, 10, EdgeConfig(0.5, 1)),
                  ContractError);
}
