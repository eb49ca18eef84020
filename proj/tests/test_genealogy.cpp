#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "operc/env.hpp"
#include "operc/genealogy.hpp"
#include "operc/paths.hpp"
#include "operc/reach.hpp"

using namespace operc;

namespace {

// Four-member fixture: r is the root, a (older) and b (younger) its
// daughters, c the only daughter of a.
//
//        r=(1,3)
//        /    |
//   a=(0,2)  b=(2,2)
//      /
//  c=(-1,1)
Forest family_fixture() {
  return Forest::from_links(Window{-1, 2, 1, 3}, {
                                                     {{-1, 1}, {0, 2}},
                                                     {{0, 2}, {1, 3}},
                                                     {{2, 2}, {1, 3}},
                                                 });
}

}  // namespace

TEST_CASE("fixture forest structure") {
  Forest f = family_fixture();
  const Vertex r{1, 3}, a{0, 2}, b{2, 2}, c{-1, 1};
  CHECK(f.size() == 4);
  CHECK(f.contains(a));
  CHECK_FALSE(f.contains({1, 1}));
  CHECK(f.window() == Window{-1, 2, 1, 3});

  CHECK(f.mother(c) == a);
  CHECK(f.mother(a) == r);
  CHECK(f.mother(b) == r);
  CHECK_FALSE(f.mother(r).has_value());
  CHECK_FALSE(f.mother_truncated(r));  // closed world: r is a genuine root

  CHECK(f.daughters(r) == std::vector<Vertex>{a, b});  // older first
  CHECK(f.daughters(a) == std::vector<Vertex>{c});
  CHECK(f.daughters(b).empty());
  CHECK(f.daughters_complete(r));
  CHECK(f.daughters_complete(b));

  CHECK(f.sigma(a) == 1);  // older sister
  CHECK(f.sigma(b) == 2);  // younger sister
  CHECK(f.sigma(c) == 1);  // only daughter counts as older
  CHECK(f.sigma(r) == 0);  // roots carry no sister rank

  CHECK(f.component(a) == f.component(b));
  CHECK(f.component(c) == f.component(r));
  CHECK(f.component_count() == 1);
  auto members = f.component_members(f.component(r));
  CHECK(members.size() == 4);
  CHECK(std::is_sorted(members.begin(), members.end(), VertexLevelOrder{}));

  CHECK_THROWS_AS(f.sigma({1, 1}), NotInForestError);
  CHECK_THROWS_AS(f.daughters({5, 1}), NotInForestError);
}

TEST_CASE("fixture kinship record") {
  Forest f = family_fixture();
  KinshipRecord k = kinship({0, 2}, f);
  CHECK(k.mother == Vertex{1, 3});
  CHECK_FALSE(k.mother_truncated);
  CHECK(k.daughters == std::vector<Vertex>{{-1, 1}});
  CHECK(k.daughters_complete);
  CHECK(k.sigma == 1);
}

TEST_CASE("iterated mothers") {
  Forest f = family_fixture();
  const Vertex r{1, 3}, a{0, 2}, c{-1, 1};
  CHECK(nth_mother(c, 0, f) == c);
  CHECK(nth_mother(c, 1, f) == a);
  CHECK(nth_mother(c, 2, f) == r);
  CHECK_FALSE(nth_mother(c, 3, f).has_value());  // chain ends at the root
  CHECK_THROWS_AS(nth_mother(c, -1, f), ContractError);
  CHECK_THROWS_AS(nth_mother({1, 1}, 1, f), NotInForestError);
}

TEST_CASE("genealogical order on the fixture") {
  Forest f = family_fixture();
  const Vertex r{1, 3}, a{0, 2}, b{2, 2}, c{-1, 1};
  // Mother-first, older branch before younger: r, a, c, b.
  const std::vector<Vertex> line{r, a, c, b};
  for (std::size_t i = 0; i < line.size(); ++i)
    for (std::size_t k = 0; k < line.size(); ++k)
      CHECK(precedes(line[i], line[k], f) == (i < k));

  CHECK(successor(r, f) == a);
  CHECK(successor(a, f) == c);
  CHECK(successor(c, f) == b);  // climbs back to a, then to younger sister b
  CHECK_FALSE(successor(b, f).has_value());

  CHECK_FALSE(predecessor(r, f).has_value());
  CHECK(predecessor(a, f) == r);
  CHECK(predecessor(c, f) == a);
  CHECK(predecessor(b, f) == c);  // youngest descent of the older sister

  CHECK(succession_line(c, 1, f) == std::vector<Vertex>{a, c, b});
  CHECK(succession_line(r, 3, f) == std::vector<Vertex>{r, a, c, b});
  CHECK(succession_line(b, 9, f) == std::vector<Vertex>{r, a, c, b});
  CHECK_THROWS_AS(succession_line(c, -1, f), ContractError);
  CHECK_THROWS_AS(precedes({1, 1}, r, f), NotInForestError);
}

TEST_CASE("branches of the fixture") {
  Forest f = family_fixture();
  BranchResult br = branch({0, 2}, f);
  CHECK(br.members == std::vector<Vertex>{{-1, 1}, {0, 2}});
  CHECK_FALSE(br.truncated);
  BranchResult whole = branch({1, 3}, f);
  CHECK(whole.members.size() == 4);
  BranchResult leaf = branch({2, 2}, f);
  CHECK(leaf.members == std::vector<Vertex>{{2, 2}});
}

TEST_CASE("separate components cannot be ordered") {
  Forest f = Forest::from_links(Window{-4, 4, 0, 4}, {
                                                         {{-2, 0}, {-1, 1}},
                                                         {{2, 0}, {3, 1}},
                                                     });
  CHECK(f.component_count() == 2);
  CHECK(f.component({-2, 0}) != f.component({2, 0}));
  CHECK_THROWS_AS(precedes({-2, 0}, {2, 0}, f), UndecidableError);
}

TEST_CASE("fixture dump lists links with ranks") {
  Forest f = family_fixture();
  CHECK(f.dump() ==
        "child_x,child_t,mother_x,mother_t,sigma\n"
        "-1,1,0,2,1\n"
        "0,2,1,3,1\n"
        "2,2,1,3,2\n");
}

TEST_CASE("from_links validates its input") {
  using Links = std::vector<std::pair<Vertex, Vertex>>;
  Window w{-2, 2, 0, 2};
  CHECK_THROWS_AS(
      Forest::from_links(w, Links{{{0, 0}, {2, 2}}}), ContractError);
  CHECK_THROWS_AS(
      Forest::from_links(w, Links{{{0, 0}, {1, 1}}, {{0, 0}, {-1, 1}}}),
      ContractError);  // two mothers
  CHECK_THROWS_AS(
      Forest::from_links(w, Links{{{4, 0}, {5, 1}}}), ContractError);
  CHECK_THROWS_AS(
      Forest::from_links(w, Links{{{1, 1}, {0, 0}}}), ContractError);
}

TEST_CASE("full density forest is one right-leaning family") {
  EdgeConfig env(1.0, 7);
  Window w{-6, 6, 0, 6};
  Forest f = build_forest(w, 20, env, 4);
  // Every window site reaches the horizon.
  std::int64_t site_count = 0;
  for (std::int64_t t = 0; t <= 6; ++t)
    for (std::int64_t x = -6; x <= 6; ++x)
      if (((x + t) & 1) == 0) ++site_count;
  CHECK(f.size() == site_count);

  for (const Vertex& v : f.vertices()) {
    Vertex up{v.x + 1, v.t + 1};
    if (w.contains(up)) {
      CHECK(f.mother(v) == up);
      CHECK(f.sigma(v) == 1);
    } else {
      CHECK_FALSE(f.mother(v).has_value());
      CHECK(f.mother_truncated(v));
    }
    // Only the left-below site lists v as mother, so the daughter list is
    // the older slot alone whenever that site exists.
    Vertex older{v.x - 1, v.t - 1};
    if (w.contains(older))
      CHECK(f.daughters(v) == std::vector<Vertex>{older});
    else
      CHECK(f.daughters(v).empty());
  }
  // Succession inside the window descends the left diagonal.
  CHECK(successor({0, 4}, f) == Vertex{-1, 3});
  CHECK(predecessor({-1, 3}, f) == Vertex{0, 4});
}

TEST_CASE("forest mothers step along open edges to co-reaching sites") {
  Window w{-10, 10, 0, 10};
  const std::int64_t N = 40;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    EdgeConfig env(0.8, seed);
    Forest f = build_forest(w, N, env, 8);
    const std::int64_t H = w.t_max + N;
    for (const Vertex& v : f.vertices()) {
      // Membership is exactly reaching the shared absolute horizon.
      CHECK(percolates_to(v, H - v.t, env));
      auto m = f.mother(v);
      if (!m) continue;
      CHECK(m->t == v.t + 1);
      CHECK(std::llabs(m->x - v.x) == 1);
      CHECK(env.is_open({v, m->x > v.x ? Side::RightUp : Side::LeftUp}));
      CHECK(percolates_to(*m, H - m->t, env));
    }
    // And no member is missed.
    for (std::int64_t t = w.t_min; t <= w.t_max; ++t)
      for (std::int64_t x = w.x_min; x <= w.x_max; ++x) {
        if (((x + t) & 1) != 0) continue;
        CHECK(f.contains({x, t}) == percolates_to({x, t}, H - t, env));
      }
  }
}

TEST_CASE("forest mothers follow the rightmost paths") {
  Window w{-8, 8, 0, 8};
  const std::int64_t N = 30;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EdgeConfig env(0.8, seed);
    Forest f = build_forest(w, N, env, 6);
    const std::int64_t H = w.t_max + N;
    for (const Vertex& v : f.vertices()) {
      auto m = f.mother(v);
      PathRec gamma = rightmost_path(v, H - v.t, env);
      Vertex expect = gamma.vertices()[1];
      if (m) {
        CHECK(*m == expect);
      } else {
        CHECK(f.mother_truncated(v));
        CHECK_FALSE(w.contains(expect));
      }
    }
  }
}

TEST_CASE("rebuilt closed world matches the built forest") {
  Window w{-8, 8, 0, 8};
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    EdgeConfig env(0.8, seed);
    Forest f = build_forest(w, 30, env, 6);
    std::vector<std::pair<Vertex, Vertex>> links;
    for (const Vertex& v : f.vertices())
      if (auto m = f.mother(v)) links.emplace_back(v, *m);
    Forest g = Forest::from_links(w, links);
    for (const Vertex& v : f.vertices()) {
      if (!g.contains(v)) continue;  // isolated members are dropped
      CHECK(g.mother(v) == f.mother(v));
      CHECK(g.daughters(v) == f.daughters(v));
      // Ranks agree wherever the built forest could decide them.
      if (f.sigma(v) != 0 && f.mother(v).has_value())
        CHECK(g.sigma(v) == f.sigma(v));
    }
  }
}

TEST_CASE("branch members are exactly the mother-chain descendants") {
  Window w{-8, 8, 0, 8};
  EdgeConfig env(0.8, 3);
  Forest f = build_forest(w, 30, env, 6);
  for (const Vertex& u : f.vertices()) {
    if (u.t != 4) continue;
    BranchResult br = branch(u, f);
    std::set<Vertex> got(br.members.begin(), br.members.end());
    CHECK(got.count(u) == 1);
    for (const Vertex& v : f.vertices()) {
      bool descends = false;
      std::optional<Vertex> cur = v;
      while (cur) {
        if (*cur == u) {
          descends = true;
          break;
        }
        cur = f.mother(*cur);
      }
      if (!br.truncated)
        CHECK(got.count(v) == (descends ? 1u : 0u));
      else if (descends)
        CHECK(got.count(v) == 1);
    }
  }
}

TEST_CASE("succession walk agrees with pairwise precedence") {
  Window w{-6, 6, 0, 6};
  EdgeConfig env(0.8, 5);
  Forest f = build_forest(w, 25, env, 5);
  std::set<std::int64_t> labels;
  for (const Vertex& v : f.vertices()) labels.insert(f.component(v));
  CHECK(static_cast<std::int64_t>(labels.size()) == f.component_count());
  for (std::int64_t label : labels) {
    auto members = f.component_members(label);
    std::vector<Vertex> sorted = members;
    try {
      std::sort(sorted.begin(), sorted.end(),
                [&](Vertex a, Vertex b) { return precedes(a, b, f); });
    } catch (const UndecidableError&) {
      continue;  // boundary component
    }
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      auto s = successor(sorted[i], f);
      if (!s) break;  // walk left the certified zone
      CHECK(*s == sorted[i + 1]);
    }
  }
}

TEST_CASE("successor and predecessor invert where defined") {
  Window w{-10, 10, 0, 10};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EdgeConfig env(0.8, seed);
    Forest f = build_forest(w, 40, env, 8);
    for (const Vertex& v : f.vertices()) {
      if (auto s = successor(v, f)) {
        if (auto back = predecessor(*s, f)) CHECK(*back == v);
      }
      if (auto p = predecessor(v, f)) {
        if (auto fwd = successor(*p, f)) CHECK(*fwd == v);
      }
    }
  }
}

TEST_CASE("build_forest validates its arguments") {
  EdgeConfig env(0.8, 1);
  CHECK_THROWS_AS(build_forest(Window{-2, 2, 0, 2}, 10, env, 11),
                  ContractError);
  CHECK_THROWS_AS(build_forest(Window{2, -2, 0, 2}, 10, env), ContractError);
  CHECK_THROWS_AS(build_forest(Window{-2, 2, 0, 2}, 0, env), ContractError);
  Forest f = build_forest(Window{-2, 2, 0, 2}, 10, env);
  CHECK(f.margin() == 2);  // default N/5
  CHECK(f.window().covers(f.safe_subwindow()));
}

TEST_CASE("safe subwindow insets by the margin") {
  EdgeConfig env(0.9, 2);
  Forest f = build_forest(Window{-10, 10, 0, 10}, 20, env, 4);
  CHECK(f.safe_subwindow() == Window{-6, 6, 4, 6});
}
