#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "bifrac/cube.hpp"

using namespace bifrac;

TEST_CASE("cube_at on the standard grid") {
  auto g = DyadicGrid::standard(1);
  Cube c = g.cube_at(0, point1(0.5));
  CHECK(c.corner(0) == 0.0);
  CHECK(c.side() == 1.0);

  Cube c2 = g.cube_at(1, point1(0.74));
  CHECK(c2.corner(0) == 0.5);
  CHECK(c2.side() == 0.5);
}

TEST_CASE("cube_at on the shifted grid, enumeration oracle") {
  DyadicGrid g(1, {1, 0});
  Cube c = g.cube_at(0, point1(0.0));
  // scan integer indices and test membership directly: corner = m + 1/3
  long long found = 1000;
  for (long long m = -3; m <= 3; ++m) {
    const double corner = m + 1.0 / 3.0;
    if (corner <= 0.0 && 0.0 < corner + 1.0) found = m;
  }
  CHECK(found == -1);
  CHECK(c.address().index[0] == found);
  CHECK(c.corner(0) == doctest::Approx(-2.0 / 3.0));
  CHECK(g.contains_point(c, point1(0.0)));
}

TEST_CASE("parent and children on the standard grid") {
  auto g = DyadicGrid::standard(1);
  Cube half = g.cube_at(1, point1(0.6));  // [0.5, 1)
  Cube parent = g.parent(half);
  CHECK(parent.corner(0) == 0.0);
  CHECK(parent.side() == 1.0);

  auto kids = g.children(parent);
  REQUIRE(kids.size() == 2);
  std::set<double> corners;
  for (const auto& k : kids) {
    CHECK(k.side() == 0.5);
    corners.insert(k.corner(0));
    CHECK(g.contains_cube(parent, k));
  }
  CHECK(corners == std::set<double>{0.0, 0.5});
}

TEST_CASE("parent in the shifted grid verified by membership") {
  DyadicGrid g(1, {1, 0});
  Cube c = g.cube_at(1, point1(0.0));
  Cube p = g.parent(c);
  CHECK(p.address().level == 0);
  CHECK(g.contains_cube(p, c));
  // parent must equal the level-0 cube containing any point of c
  Cube p2 = g.cube_at(0, point1(c.center(0)));
  CHECK(p2.address().index == p.address().index);
}

TEST_CASE("children partition their parent exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const auto& g : DyadicGrid::shifted_family(2)) {
    for (int rep = 0; rep < 50; ++rep) {
      Cube c = g.cube_at(3, point2(u(rng), u(rng)));
      auto kids = g.children(c);
      REQUIRE(kids.size() == 4);
      for (int s = 0; s < 40; ++s) {
        Point p{c.corner(0) + std::abs(u(rng)) / 8.0 * c.side(),
                c.corner(1) + std::abs(u(rng)) / 8.0 * c.side()};
        if (!g.contains_point(c, p)) continue;
        int hits = 0;
        for (const auto& k : kids) hits += g.contains_point(k, p) ? 1 : 0;
        CHECK(hits == 1);
      }
    }
  }
}

TEST_CASE("levels partition sampled points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-7.9, 7.9);
  for (int dim = 1; dim <= 2; ++dim) {
    for (const auto& g : DyadicGrid::shifted_family(dim)) {
      for (int level = -3; level <= 8; ++level) {
        for (int rep = 0; rep < 30; ++rep) {
          Point p{u(rng), dim == 2 ? u(rng) : 0.0};
          Cube c = g.cube_at(level, p);
          CHECK(g.contains_point(c, p));
          // neighbors do not contain it
          for (long long d = -1; d <= 1; d += 2) {
            auto idx = c.address().index;
            idx[0] += d;
            CHECK(!g.contains_point(g.cube(level, idx), p));
          }
        }
      }
    }
  }
}

TEST_CASE("nesting trichotomy within one grid") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  DyadicGrid g(1, {1, 0});
  std::vector<Cube> cubes;
  for (int level = -2; level <= 5; ++level)
    for (int rep = 0; rep < 8; ++rep) cubes.push_back(g.cube_at(level, point1(u(rng))));
  // exact interval bounds in units of 2^{-K}/3 at the common finer level K
  auto exact_bounds = [](const Cube& c, int K) {
    const int d = K - c.address().level;
    const long long lo = c.address().corner_thirds(0) << d;
    return std::pair<long long, long long>{lo, lo + (3LL << d)};
  };
  for (const auto& a : cubes) {
    for (const auto& b : cubes) {
      const bool a_in_b = g.contains_cube(b, a);
      const bool b_in_a = g.contains_cube(a, b);
      const int K = std::max(a.address().level, b.address().level);
      const auto [alo, ahi] = exact_bounds(a, K);
      const auto [blo, bhi] = exact_bounds(b, K);
      const bool overlap = !(ahi <= blo || bhi <= alo);
      CHECK(overlap == (a_in_b || b_in_a));
    }
  }
}

TEST_CASE("lerner cover of a dyadic cube is itself") {
  auto cover = lerner_cover(Cube::interval(0.0, 1.0));
  CHECK(cover.grid.shift_thirds()[0] == 0);
  CHECK(cover.cube.corner(0) == 0.0);
  CHECK(cover.cube.side() == 1.0);
}

TEST_CASE("lerner cover: spec'd awkward cubes") {
  {
    Cube q = Cube::interval(-0.1, 0.9);
    auto cover = lerner_cover(q);
    CHECK(cover.grid.contains_cube(cover.cube, q));
    CHECK(cover.cube.side() <= 6.0 * q.side());
  }
  {
    Cube q = Cube::interval(0.3, 0.300001);
    auto cover = lerner_cover(q);
    CHECK(cover.grid.contains_cube(cover.cube, q));
    CHECK(cover.cube.side() <= 6.0 * q.side());
    CHECK(cover.cube.side() <= 6e-6);
  }
}

TEST_CASE("lerner cover: random cubes in 1 and 2 dimensions") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-8.0, 8.0);
  std::uniform_real_distribution<double> logside(-20.0, 3.0);
  for (int dim = 1; dim <= 2; ++dim) {
    for (int rep = 0; rep < 1000; ++rep) {
      const double side = std::exp2(logside(rng));
      Point c{pos(rng), dim == 2 ? pos(rng) : 0.0};
      Cube q(dim, c, side);
      auto cover = lerner_cover(q);
      CHECK(cover.grid.contains_cube(cover.cube, q));
      CHECK(cover.cube.side() <= 6.0 * q.side());
    }
  }
}

TEST_CASE("triple cube is the concentric closed triple") {
  Cube q = Cube::interval(1.0, 1.5);
  Cube t = q.triple();
  CHECK(t.side() == doctest::Approx(1.5));
  CHECK(t.center(0) == doctest::Approx(q.center(0)));
}

TEST_CASE("unaddressed cubes refuse tree operations") {
  auto g = DyadicGrid::standard(1);
  CHECK_THROWS_AS(g.parent(Cube::interval(0, 1)), std::invalid_argument);
}
