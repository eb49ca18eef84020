#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "operc/env.hpp"
#include "operc/kuczek.hpp"
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

}  // namespace

TEST_CASE("right edge series at the density extremes") {
  auto full = right_edge_series(EdgeConfig(1.0, 1), 8);
  REQUIRE(full.size() == 9);
  for (std::int64_t n = 0; n <= 8; ++n) {
    REQUIRE(full[static_cast<std::size_t>(n)].r.has_value());
    CHECK(*full[static_cast<std::size_t>(n)].r == n);
    CHECK_FALSE(full[static_cast<std::size_t>(n)].truncation_affected);
  }
  auto dead = right_edge_series(EdgeConfig(0.0, 1), 4);
  CHECK(dead[0].r == 0);
  CHECK_FALSE(dead[0].truncation_affected);
  for (std::size_t n = 1; n <= 4; ++n) {
    CHECK_FALSE(dead[n].r.has_value());
    CHECK(dead[n].truncation_affected);  // extinction is a truncation artifact
  }
}

TEST_CASE("right edge decreases in density under a shared seed") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto lo = right_edge_series(EdgeConfig(0.6, seed), 40);
    auto hi = right_edge_series(EdgeConfig(0.8, seed), 40);
    for (std::size_t n = 0; n < lo.size(); ++n) {
      if (!lo[n].r) continue;
      REQUIRE(hi[n].r.has_value());
      CHECK(*lo[n].r <= *hi[n].r);
    }
  }
}

TEST_CASE("break points of the six edge fixture") {
  ExplicitConfig cfg = six_edge_fixture();
  BreakPointSeries s = break_points({0, 0}, cfg, 2, 0);
  CHECK(s.origin() == Vertex{0, 0});
  CHECK(s.horizon() == 2);
  CHECK(s.r_prime(0) == 0);
  CHECK(s.r_prime(1) == 1);   // frontier {(-1,1),(1,1)}
  CHECK(s.r_prime(2) == 0);   // frontier {(0,2)}
  CHECK_FALSE(s.primed(0));
  CHECK_FALSE(s.primed(2));
  // (1,1) is dead, so level 1 is no break; level 2 sits at the horizon.
  REQUIRE(s.records().size() == 1);
  CHECK(s.records()[0] == BreakRecord{2, 0, 2});
  CHECK(s.to_csv() == "m,T,X,tau\n1,2,0,2\n");

  WalkPath w = walk({0, 0}, cfg, 2, 0);
  REQUIRE(w.jumps().size() == 1);
  CHECK(w.jumps()[0] == WalkJump{2, 0});
  CHECK(w.position_at(0) == 0);
  CHECK(w.position_at(1) == 0);
  CHECK(w.position_at(2) == 0);
  CHECK(w.jump_at(2) == 0);
  CHECK_FALSE(w.jump_at(1).has_value());
  CHECK(w.to_csv() == "level,column\n2,0\n");
}

TEST_CASE("full density breaks at every level") {
  EdgeConfig env(1.0, 4);
  BreakPointSeries s = break_points({0, 0}, env, 10, 2);
  REQUIRE(s.records().size() == 8);
  for (std::size_t m = 0; m < s.records().size(); ++m) {
    CHECK(s.records()[m] ==
          BreakRecord{static_cast<std::int64_t>(m) + 1, 1, 1});
    CHECK(s.r_prime(static_cast<std::int64_t>(m)) ==
          static_cast<std::int64_t>(m));
    CHECK(s.r(static_cast<std::int64_t>(m)) ==
          static_cast<std::int64_t>(m));
  }
}

TEST_CASE("break points need a surviving origin") {
  CHECK_THROWS_AS(break_points({0, 0}, EdgeConfig(0.0, 1), 4, 0), NoPathError);
  CHECK_THROWS_AS(break_points({0, 0}, EdgeConfig(0.5, 1), 4, 5),
                  ContractError);
  CHECK_THROWS_AS(break_points({0, 0}, EdgeConfig(0.5, 1), -1, 0),
                  ContractError);
}

TEST_CASE("series constructor validates the records") {
  std::vector<std::int64_t> rp{0, 1, 2};
  std::vector<bool> pr{false, false, false};
  CHECK_NOTHROW(BreakPointSeries({0, 0}, 2, 0, {{1, 1, 1}, {2, 1, 1}}, rp, pr));
  CHECK_THROWS_AS(BreakPointSeries({0, 0}, 2, 0, {{1, 1, 0}}, rp, pr),
                  ContractError);  // zero holding time
  CHECK_THROWS_AS(BreakPointSeries({0, 0}, 2, 0, {{1, 2, 1}}, rp, pr),
                  ContractError);  // jump outside the cone
  CHECK_THROWS_AS(BreakPointSeries({0, 0}, 2, 0, {{1, 0, 1}}, rp, pr),
                  ContractError);  // parity mismatch
  CHECK_THROWS_AS(BreakPointSeries({0, 0}, 2, 0, {{2, 1, 1}}, rp, pr),
                  ContractError);  // levels disagree with holding times
  CHECK_THROWS_AS(BreakPointSeries({0, 0}, 2, 1, {{1, 1, 1}, {2, 1, 1}}, rp, pr),
                  ContractError);  // record above the margin cutoff
  CHECK_THROWS_AS(BreakPointSeries({0, 0}, 4, 0, {}, rp, pr),
                  ContractError);  // track does not cover 0..N
  CHECK_THROWS_AS(
      WalkPath({0, 0}, 4, 0, {{2, 0}, {2, 2}}), ContractError);
  WalkPath w({0, 0}, 6, 0, {{2, 2}, {5, 1}});
  CHECK(w.position_at(1) == 0);
  CHECK(w.position_at(2) == 2);
  CHECK(w.position_at(4) == 2);
  CHECK(w.position_at(5) == 1);
  CHECK(w.position_at(6) == 1);
  CHECK_THROWS_AS(w.position_at(7), ContractError);
}

TEST_CASE("break levels are exactly the co-reaching frontier maxima") {
  const std::int64_t N = 30;
  int used = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    EdgeConfig env(0.75, seed);
    if (!percolates_to({0, 0}, N, env)) continue;
    ++used;
    BreakPointSeries s = break_points({0, 0}, env, N, 5);
    // Independent recomputation from the cluster rows.
    Window cw = cone_window({0, 0}, Direction::Forward, N);
    auto cl = oracle::cluster({0, 0}, env, cw);
    std::vector<std::int64_t> break_levels;
    for (std::int64_t n = 1; n <= N - 5; ++n) {
      std::int64_t rmax = INT64_MIN;
      for (const Vertex& v : cl)
        if (v.t == n) rmax = std::max(rmax, v.x);
      REQUIRE(rmax != INT64_MIN);  // survival keeps every level occupied
      CHECK(rmax == s.r_prime(n));
      if (percolates_to({rmax, n}, N - n, env)) break_levels.push_back(n);
    }
    std::vector<std::int64_t> got;
    for (const BreakRecord& rec : s.records()) got.push_back(rec.T);
    CHECK(got == break_levels);
  }
  CHECK(used >= 10);
}

TEST_CASE("records reconstruct the right edge at break levels") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EdgeConfig env(0.8, seed);
    if (!percolates_to({2, 0}, 120, env)) continue;
    BreakPointSeries s = break_points({2, 0}, env, 120, 20);
    WalkPath w = walk({2, 0}, env, 120, 20);
    std::int64_t col = 0, level = 0;
    for (const BreakRecord& rec : s.records()) {
      col += rec.X;
      level = rec.T;
      CHECK(s.r_prime(level) == 2 + col);
      CHECK(w.position_at(level) == col);
      CHECK(w.jump_at(level) == col);
    }
  }
}

TEST_CASE("walk tracks the rightmost path at break levels") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EdgeConfig env(0.8, seed);
    if (!percolates_to({0, 0}, 200, env)) continue;
    PathRec gamma = rightmost_path({0, 0}, 200, env);
    WalkPath w = walk({0, 0}, env, 200, 40);
    for (const WalkJump& j : w.jumps()) {
      CHECK(gamma.column_at(j.level) == j.col);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("meeting of walks and meeting of paths") {
  SUBCASE("full density walks from distinct origins never meet") {
    EdgeConfig env(1.0, 1);
    CHECK_FALSE(walks_meet({0, 0}, {2, 0}, env, 30, 5).has_value());
    CHECK_FALSE(paths_meet({0, 0}, {2, 0}, env, 30, 5).has_value());
  }
  SUBCASE("identical origins meet immediately") {
    EdgeConfig env(1.0, 1);
    auto pm = paths_meet({0, 0}, {0, 0}, env, 20, 4);
    REQUIRE(pm.has_value());
    CHECK(*pm == Vertex{0, 0});
    auto wm = walks_meet({0, 0}, {0, 0}, env, 20, 4);
    REQUIRE(wm.has_value());
    CHECK(*wm == Vertex{1, 1});  // first synchronized jump
  }
  SUBCASE("a walk meeting implies a path meeting no higher") {
    const std::int64_t N = 150, margin = 30;
    int met = 0, used = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      EdgeConfig env(0.8, seed);
      std::int64_t H = N;
      std::optional<Vertex> pm, wm;
      try {
        pm = paths_meet({0, 0}, {4, 0}, env, N, margin);
        wm = walks_meet({0, 0}, {4, 0}, env, N, margin);
      } catch (const NoPathError&) {
        continue;  // conditioning on both origins surviving
      }
      ++used;
      if (wm) {
        ++met;
        REQUIRE(pm.has_value());
        CHECK(pm->t <= wm->t);
        CHECK(wm->t <= H - margin);
      }
    }
    CHECK(used >= 20);
    CHECK(met >= 5);
  }
  SUBCASE("origins on different levels share an absolute horizon") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      EdgeConfig env(0.85, seed);
      std::optional<Vertex> pm;
      try {
        pm = paths_meet({0, 0}, {2, 2}, env, 80, 16);
      } catch (const NoPathError&) {
        continue;
      }
      if (pm) {
        CHECK(pm->t >= 2);
        CHECK(pm->t <= 2 + 80 - 16);
      }
    }
  }
}

TEST_CASE("crossing points against a reference line") {
  EdgeConfig full(1.0, 1);
  PathRec gamma = rightmost_path({0, 0}, 10, full);
  // The all-right path runs along the slope-one line: every edge touches.
  CHECK(crossing_points(gamma, 1.0).size() == 10);
  // Against a flatter line only the first edge (anchored at the origin)
  // touches; afterwards the path stays strictly above.
  auto once = crossing_points(gamma, 0.5);
  REQUIRE(once.size() == 1);
  CHECK(once[0] == Vertex{1, 1});
  CHECK_THROWS_AS(crossing_points(gamma, 0.0), ContractError);
  CHECK_THROWS_AS(crossing_points(gamma, -2.0), ContractError);

  // A hand-built zig-zag against a near-vertical reference line: the
  // first segment touches it at the origin, the second crosses it, and
  // the rest stay strictly on the left.
  PathRec zig{{0, 0}, false,
              {Side::RightUp, Side::LeftUp, Side::LeftUp, Side::RightUp}};
  CHECK(crossing_points(zig, 1e-9) ==
        std::vector<Vertex>{{1, 1}, {0, 2}});
}

TEST_CASE("csv forms are stable") {
  BreakPointSeries s({0, 0}, 3, 0, {{2, 0, 2}, {3, 1, 1}}, {0, 1, 0, 1},
                     {false, false, false, false});
  CHECK(s.to_csv() == "m,T,X,tau\n1,2,0,2\n2,3,1,1\n");
  WalkPath w({0, 0}, 3, 0, {{2, 0}, {3, 1}});
  CHECK(w.to_csv() == "level,column\n2,0\n3,1\n");
}
