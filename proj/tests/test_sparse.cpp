#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "bifrac/family.hpp"
#include "bifrac/scan.hpp"
#include "bifrac/sparse.hpp"

using namespace bifrac;

TEST_CASE("zero data gives an empty family") {
  const Mesh mesh{1, 1, 5};
  GridFunction z = GridFunction::zeros(mesh);
  auto grid = DyadicGrid::standard(1);
  auto fam = cz_select(z, z, YoungFunction::power(1), YoungFunction::power(1), 4.0, grid);
  CHECK(fam.empty());
  CHECK(fam.cube_count() == 0);
  CHECK(fam.min_carve_ratio() == 1.0);
}

TEST_CASE("selection preconditions") {
  const Mesh mesh{1, 1, 4};
  GridFunction f = GridFunction::indicator(mesh, Cube::interval(0, 1));
  auto grid = DyadicGrid::standard(1);
  CHECK_THROWS_AS(cz_select(f, f, YoungFunction::power(1), YoungFunction::power(1), 1.0, grid),
                  std::invalid_argument);
  GridFunction neg = GridFunction::constant(mesh, -1.0);
  CHECK_THROWS_AS(cz_select(f, neg, YoungFunction::power(1), YoungFunction::power(1), 4.0, grid),
                  std::invalid_argument);
}

TEST_CASE("indicator selection matches the exhaustive dyadic oracle") {
  const Mesh mesh{1, 1, 6};
  GridFunction f = GridFunction::indicator(mesh, Cube::interval(0, 1));
  auto grid = DyadicGrid::standard(1);
  const double a = 4.0;
  auto fam = cz_select(f, f, YoungFunction::power(1), YoungFunction::power(1), a, grid);

  // oracle: for each k, maximal dyadic cubes with (|Q cap [0,1)| / |Q|)^2 > 4^k,
  // computed with plain interval arithmetic
  const auto frac = [](int level, long long m) {
    const double side = std::ldexp(1.0, -level);
    const double lo = m * side, hi = lo + side;
    return std::max(0.0, std::min(hi, 1.0) - std::max(lo, 0.0)) / side;
  };
  for (int k = fam.k_min(); k <= fam.k_max(); ++k) {
    const double threshold = std::pow(a, k);
    std::set<std::pair<int, long long>> oracle;
    for (int level = -4; level <= mesh.res_level; ++level) {
      const long long lo = static_cast<long long>(std::floor(-2.0 * std::ldexp(1.0, level)));
      const long long hi = static_cast<long long>(std::ceil(2.0 * std::ldexp(1.0, level)));
      for (long long m = lo; m <= hi; ++m) {
        const double val = frac(level, m) * frac(level, m);
        if (!(val > threshold)) continue;
        const double parent_val =
            frac(level - 1, m >= 0 ? m / 2 : -((-m + 1) / 2)) *
            frac(level - 1, m >= 0 ? m / 2 : -((-m + 1) / 2));
        if (parent_val > threshold) continue;  // not maximal
        oracle.insert({level, m});
      }
    }
    std::set<std::pair<int, long long>> got;
    for (const auto& sel : fam.level(k))
      got.insert({sel.cube.address().level, sel.cube.address().index[0]});
    CHECK_MESSAGE(got == oracle, "k=", k);
  }
}

TEST_CASE("sparse invariants hold on random draws for both selection routes") {
  std::mt19937_64 seeds(2024);
  for (int dim : {1, 2}) {
    const Mesh mesh = dim == 1 ? Mesh{1, 1, 6} : Mesh{2, 0, 4};
    const double a_orlicz = std::ldexp(1.0, 2 * dim + 4);  // 2^{2n+4}
    const double a_power = std::ldexp(1.0, dim + 2);       // 2^{n+2}
    const auto grid = DyadicGrid::standard(dim);
    FamilySpec fspec;
    fspec.kind = FamilyKind::random_nonnegative;
    fspec.count = 2;
    fspec.box = dim == 1 ? Cube::interval(-1, 1) : Cube::square(-1, -1, 2);
    const int draws = dim == 1 ? 30 : 10;
    for (int d = 0; d < draws; ++d) {
      auto fg = make_test_family(mesh, fspec, seeds());
      // Orlicz-product route (N = 2, m = 1 log factors)
      auto fam1 = cz_select(fg[0], fg[1], YoungFunction::l_log_l(1), YoungFunction::l_log_l(1),
                            a_orlicz, grid);
      CHECK(fam1.min_carve_ratio() >= 0.5);
      CHECK(fam1.carved_sets_disjoint());
      // power route with the volume factor
      auto fam2 = cz_select(fg[0], fg[1], YoungFunction::power(2), YoungFunction::power(2),
                            a_power, grid, 0.5, true);
      CHECK(fam2.min_carve_ratio() >= 0.5);
      CHECK(fam2.carved_sets_disjoint());
      // maximality: the parent of every selected cube fails its threshold
      CzFunctional func{&fg[0], &fg[1], YoungFunction::power(2), YoungFunction::power(2), 0.5,
                        true};
      for (int k : fam2.level_indices()) {
        const double threshold = std::pow(a_power, k);
        for (const auto& sel : fam2.level(k)) {
          CHECK(sel.functional > threshold);
          CHECK(func(grid.parent(sel.cube)) <= threshold * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("covering identity: omega_k equals the dyadic superlevel set") {
  const Mesh mesh{1, 1, 6};
  FamilySpec fspec;
  fspec.kind = FamilyKind::random_nonnegative;
  fspec.count = 2;
  fspec.box = Cube::interval(-1.5, 1.5);
  auto fg = make_test_family(mesh, fspec, 99);
  const auto grid = DyadicGrid::standard(1);
  const double a = 8.0;
  auto fam = cz_select(fg[0], fg[1], YoungFunction::power(2), YoungFunction::power(2), a, grid,
                       0.5, true);
  REQUIRE(!fam.empty());

  // independent field: paint the functional over every dyadic cube
  CzFunctional func{&fg[0], &fg[1], YoungFunction::power(2), YoungFunction::power(2), 0.5, true};
  MaxField field(mesh);
  const double w = mesh.half_width(), eps = mesh.cell_side() / 4;
  for (int level = mesh.res_level; level >= -(mesh.box_level + 4); --level) {
    const auto lo = grid.cube_at(level, {-w, 0}).address().index[0];
    const auto hi = grid.cube_at(level, {w - eps, 0}).address().index[0];
    for (long long m = lo; m <= hi; ++m) {
      const Cube q = grid.cube(level, {m, 0});
      field.paint(q, func(q));
    }
  }
  GridFunction maximal = field.take();
  for (int k : fam.level_indices()) {
    const double threshold = std::pow(a, k);
    const auto& mask = fam.omega_mask(k);
    REQUIRE(mask.size() == static_cast<size_t>(mesh.cell_count()));
    for (long long i = 0; i < mesh.cell_count(); ++i) {
      const bool in_super = maximal.value(i) > threshold;
      CHECK(static_cast<bool>(mask[static_cast<size_t>(i)]) == in_super);
    }
  }
}

TEST_CASE("band partitioning: every loaded cube lies in a unique selected cube") {
  const Mesh mesh{1, 1, 5};
  GridFunction f = GridFunction::indicator(mesh, Cube::interval(-0.75, 1.0));
  GridFunction g = GridFunction::indicator(mesh, Cube::interval(0.0, 1.5));
  const auto grid = DyadicGrid::standard(1);
  const double a = 8.0;
  auto fam = cz_select(f, g, YoungFunction::power(2), YoungFunction::power(2), a, grid, 0.5, true);
  CzFunctional func{&f, &g, YoungFunction::power(2), YoungFunction::power(2), 0.5, true};
  const double w = mesh.half_width(), eps = mesh.cell_side() / 4;
  for (int level = mesh.res_level; level >= -(mesh.box_level + 2); --level) {
    const auto lo = grid.cube_at(level, {-w, 0}).address().index[0];
    const auto hi = grid.cube_at(level, {w - eps, 0}).address().index[0];
    for (long long m = lo; m <= hi; ++m) {
      const Cube q = grid.cube(level, {m, 0});
      const double val = func(q);
      if (!(val > std::pow(a, fam.k_min()))) continue;
      const int band = static_cast<int>(std::ceil(std::log(val) / std::log(a))) - 1;
      REQUIRE(band >= fam.k_min());
      REQUIRE(band <= fam.k_max());
      int containers = 0;
      for (const auto& sel : fam.level(band))
        if (grid.contains_cube(sel.cube, q)) ++containers;
      CHECK_MESSAGE(containers == 1, "level=", level, " m=", m, " band=", band, " F=", val);
    }
  }
}

TEST_CASE("sparse sums: empty, single cube, manual composition") {
  const Mesh mesh{1, 1, 5};
  GridFunction z = GridFunction::zeros(mesh);
  const auto grid = DyadicGrid::standard(1);
  auto empty = cz_select(z, z, YoungFunction::power(1), YoungFunction::power(1), 4.0, grid);
  CHECK(sparse_sum(empty, 1.0, {}) == 0.0);

  GridFunction f = GridFunction::indicator(mesh, Cube::interval(0, 1));
  auto fam = cz_select(f, f, YoungFunction::power(1), YoungFunction::power(1), 1e9, grid);
  // enormous threshold base: exactly one level with the maximal unit cube(s)
  REQUIRE(fam.cube_count() >= 1);
  std::vector<SparseTerm> terms;
  terms.push_back({&f, YoungFunction::l_log_l(1), 0.7});
  const double got = sparse_sum(fam, 1.25, terms);
  long double manual = 0;
  for (int k : fam.level_indices())
    for (const auto& sel : fam.level(k))
      manual += std::pow(sel.cube.volume(), 1.25) *
                std::pow(orlicz_norm(f, sel.cube, YoungFunction::l_log_l(1)), 0.7);
  CHECK(got == doctest::Approx(static_cast<double>(manual)).epsilon(1e-14));
}

TEST_CASE("geometric collapse of the subtree weights") {
  const auto grid = DyadicGrid::standard(1);
  const Cube top = grid.cube_at(0, point1(0.25));
  for (double alpha : {0.25, 0.5, 0.85}) {
    for (double q : {0.7, 1.0, 2.0}) {
      const double got = dyadic_subtree_weight_sum(grid, top, alpha, q, 12);
      const double aq = std::exp2(alpha * q);
      const double expect = aq / (aq - 1.0);
      CHECK_MESSAGE(std::abs(got - expect) < 1e-10, "alpha=", alpha, " q=", q);
    }
  }
  // 2-d sanity at shallow explicit depth
  const auto grid2 = DyadicGrid::standard(2);
  const Cube top2 = grid2.cube_at(0, point2(0.25, 0.25));
  const double got2 = dyadic_subtree_weight_sum(grid2, top2, 0.5, 1.0, 6);
  const double aq2 = std::exp2(0.5);
  CHECK(std::abs(got2 - aq2 / (aq2 - 1.0)) < 1e-10);
}

TEST_CASE("family json dump carries addresses and carve ratios") {
  const Mesh mesh{1, 1, 5};
  GridFunction f = GridFunction::indicator(mesh, Cube::interval(0, 1));
  const auto grid = DyadicGrid::standard(1);
  auto fam = cz_select(f, f, YoungFunction::power(1), YoungFunction::power(1), 64.0, grid);
  std::ostringstream os;
  fam.write_json(os);
  const std::string s = os.str();
  CHECK(s.find("\"threshold_base\": 64") != std::string::npos);
  CHECK(s.find("carve_ratio") != std::string::npos);
  CHECK(s.find("\"grid\": \"t0\"") != std::string::npos);
}
