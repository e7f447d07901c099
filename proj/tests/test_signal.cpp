#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bifrac/family.hpp"
#include "bifrac/grid_function.hpp"

using namespace bifrac;

namespace {
const Mesh kMesh1{1, 2, 6};  // [-4,4), h = 1/64
}

TEST_CASE("average of a constant is the constant") {
  GridFunction f = GridFunction::constant(kMesh1, 3.25);
  CHECK(f.average(Cube::interval(-1.0, 2.5)) == doctest::Approx(3.25).epsilon(1e-14));
}

TEST_CASE("average of an indicator is the measure ratio") {
  GridFunction f = GridFunction::indicator(kMesh1, Cube::interval(0.0, 1.0));
  CHECK(f.average(Cube::interval(0.0, 2.0)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("misaligned average cross-checked by a refinement oracle") {
  const Mesh coarse{1, 2, 4};
  const Mesh fine{1, 2, 10};
  GridFunction f4 = GridFunction::indicator(coarse, Cube::interval(0.0, 1.0));
  GridFunction f10 = GridFunction::indicator(fine, Cube::interval(0.0, 1.0));
  const Cube q = Cube::interval(0.25, 1.75);
  CHECK(f4.average(q) == doctest::Approx(0.5).epsilon(1e-13));
  // brute-force subcell summation on the fine mesh
  long double acc = 0;
  for (long long i = 0; i < fine.cells_per_axis(); ++i) {
    const double c0 = fine.cell_corner(i), c1 = fine.cell_corner(i + 1);
    const double cover = std::max(0.0, std::min(c1, q.upper(0)) - std::max(c0, q.corner(0)));
    acc += cover * f10.value(i);
  }
  CHECK(f4.average(q) == doctest::Approx(static_cast<double>(acc) / q.volume()).epsilon(1e-12));
}

TEST_CASE("average over cubes reaching outside the box counts the outside as zero") {
  GridFunction f = GridFunction::constant(kMesh1, 1.0);
  CHECK(f.average(Cube::interval(3.0, 7.0)) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("averages stay within min/max and are linear") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  std::vector<double> va(static_cast<size_t>(kMesh1.cell_count())), vb = va;
  for (auto& x : va) x = u(rng);
  for (auto& x : vb) x = u(rng);
  GridFunction a(kMesh1, va), b(kMesh1, vb);
  for (int rep = 0; rep < 200; ++rep) {
    const double lo = u(rng), len = std::abs(u(rng)) + 0.01;
    const Cube q = Cube::interval(lo, lo + len);
    const double m = a.average(q);
    if (q.corner(0) >= -4 && q.upper(0) <= 4) {
      CHECK(m >= a.min_value() - 1e-12);
      CHECK(m <= a.max_value() + 1e-12);
    }
    const double lin = GridFunction::zip(a, b, [](double x, double y) { return 2.0 * x + y; }).average(q);
    CHECK(lin == doctest::Approx(2.0 * m + b.average(q)).epsilon(1e-10));
  }
}

TEST_CASE("lp norms: indicators and weights") {
  GridFunction f = GridFunction::indicator(kMesh1, Cube::interval(0.0, 1.0));
  CHECK(f.lp_norm(2.0) == doctest::Approx(1.0).epsilon(1e-13));

  GridFunction one = GridFunction::constant(kMesh1, 1.0);
  GridFunction w = GridFunction::indicator(kMesh1, Cube::interval(0.0, 1.0));
  CHECK(one.lp_norm(1.0, &w) == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(f.lp_norm(0.0), std::invalid_argument);
}

TEST_CASE("lp norm of x on [0,1) converges to 1/sqrt(3) at first order") {
  double err_prev = 0;
  for (int L : {5, 6, 7}) {
    const Mesh mesh{1, 2, L};
    GridFunction f = GridFunction::sample(mesh, [](const Point& p) {
      return (p[0] >= 0 && p[0] < 1) ? p[0] : 0.0;
    });
    const double err = std::abs(f.lp_norm(2.0) - 1.0 / std::sqrt(3.0));
    CHECK(err < 2.0 * mesh.cell_side());
    if (err_prev > 0) CHECK(err < 0.75 * err_prev);
    err_prev = err;
  }
}

TEST_CASE("refinement consistency: averages of smooth samples move by O(h)") {
  const Cube q = Cube::interval(-0.7, 1.3);
  double prev = 0, prev_gap = 0;
  double reference = 0;
  {
    const Mesh fine{1, 2, 10};
    reference = GridFunction::sample(fine, [](const Point& p) { return std::sin(p[0]) + 2; })
                    .average(q);
  }
  for (int L : {4, 5, 6}) {
    const Mesh mesh{1, 2, L};
    GridFunction f = GridFunction::sample(mesh, [](const Point& p) { return std::sin(p[0]) + 2; });
    const double avg = f.average(q);
    const double gap = std::abs(avg - reference);
    CHECK(gap < 4 * mesh.cell_side());
    if (prev > 0) CHECK(gap < 0.8 * prev_gap + 1e-12);
    prev = avg;
    prev_gap = gap;
  }
  (void)prev;
}

TEST_CASE("discrete three-factor Holder inequality on random data") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    const double p1 = 2.0 + 3.0 * u(rng);
    const double p2 = 2.0 + 3.0 * u(rng);
    const double slack = 1.0 - 1.0 / p1 - 1.0 / p2;
    REQUIRE(slack > 0);
    const double p3 = 1.0 / (slack * (1.0 + u(rng)));  // so 1/p1+1/p2+1/p3 >= 1
    const int n = 40;
    double lhs = 0, s1 = 0, s2 = 0, s3 = 0;
    for (int j = 0; j < n; ++j) {
      const double a = u(rng), b = u(rng), c = u(rng);
      lhs += a * b * c;
      s1 += std::pow(a, p1);
      s2 += std::pow(b, p2);
      s3 += std::pow(c, p3);
    }
    const double rhs = std::pow(s1, 1 / p1) * std::pow(s2, 1 / p2) * std::pow(s3, 1 / p3);
    CHECK(lhs <= rhs * (1 + 1e-12));
  }
}

TEST_CASE("prefix sums match direct summation to a few ulps") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> v(static_cast<size_t>(kMesh1.cell_count()));
  for (auto& x : v) x = u(rng);
  GridFunction f(kMesh1, v);
  std::uniform_int_distribution<long long> idx(0, kMesh1.cells_per_axis());
  for (int rep = 0; rep < 500; ++rep) {
    long long i0 = idx(rng), i1 = idx(rng);
    if (i0 > i1) std::swap(i0, i1);
    long double direct = 0;
    for (long long i = i0; i < i1; ++i) direct += v[static_cast<size_t>(i)];
    const double got = f.block_sum(i0, i1);
    CHECK(std::abs(got - static_cast<double>(direct)) <=
          8 * std::ldexp(std::max(std::abs(got), 1e-30), -52));
  }
}

TEST_CASE("2-d averages agree with separable products") {
  const Mesh mesh{2, 1, 4};
  GridFunction f = GridFunction::indicator(mesh, Cube::square(0.0, 0.0, 1.0));
  CHECK(f.average(Cube::square(0.0, 0.0, 2.0)) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(f.average(Cube::square(-0.3, -0.3, 1.3)) ==
        doctest::Approx(1.0 / (1.3 * 1.3)).epsilon(1e-12));
}

TEST_CASE("abs_power cells integrate the power exactly away from clipping") {
  const Mesh mesh{1, 1, 6};
  GridFunction w = GridFunction::abs_power(mesh, -0.5);
  // integral over [0,1) of x^{-1/2} is 2, represented exactly by cell averages
  CHECK(w.integral_over(Cube::interval(0.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-12));
  GridFunction w2 = GridFunction::abs_power(mesh, 1.5);
  CHECK(w2.integral_over(Cube::interval(0.0, 2.0)) ==
        doctest::Approx(std::pow(2.0, 2.5) / 2.5).epsilon(1e-12));
}

TEST_CASE("abs_power center clip for non-integrable exponents") {
  const Mesh mesh{1, 1, 4};
  GridFunction w = GridFunction::abs_power(mesh, -1.5);
  const double h = mesh.cell_side();
  const long long origin_cell = mesh.cells_per_axis() / 2;
  CHECK(w.value(origin_cell) == doctest::Approx(std::pow(h / 2, -1.5)));
  CHECK(std::isfinite(w.max_value()));
}

TEST_CASE("binary and csv round trips") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Mesh mesh{1, 1, 3};
  std::vector<double> v(static_cast<size_t>(mesh.cell_count()));
  for (auto& x : v) x = u(rng);
  GridFunction f(mesh, v);

  std::stringstream bin;
  f.write_binary(bin);
  GridFunction fb = GridFunction::read_binary(bin);
  CHECK(fb.mesh() == mesh);
  for (long long i = 0; i < mesh.cell_count(); ++i) CHECK(fb.value(i) == f.value(i));

  std::stringstream csv;
  f.write_csv(csv);
  GridFunction fc = GridFunction::read_csv(csv);
  for (long long i = 0; i < mesh.cell_count(); ++i)
    CHECK(fc.value(i) == doctest::Approx(f.value(i)).epsilon(1e-15));
}

TEST_CASE("test families are deterministic and admissible") {
  const Mesh mesh{1, 2, 6};
  FamilySpec spec;
  spec.kind = FamilyKind::random_nonnegative;
  spec.count = 4;
  auto fam1 = make_test_family(mesh, spec, 99);
  auto fam2 = make_test_family(mesh, spec, 99);
  REQUIRE(fam1.size() == 4);
  for (size_t k = 0; k < fam1.size(); ++k) {
    CHECK(fam1[k].min_value() >= 0.0);
    CHECK(std::isfinite(fam1[k].max_value()));
    for (long long i = 0; i < mesh.cell_count(); ++i)
      REQUIRE(fam1[k].value(i) == fam2[k].value(i));
  }

  FamilySpec pw;
  pw.kind = FamilyKind::truncated_power;
  pw.exponent = -0.5;
  auto fam3 = make_test_family(mesh, pw, 1);
  const double cap = std::pow(mesh.cell_side(), -0.5);
  CHECK(fam3[0].max_value() <= cap * (1 + 1e-12));
  CHECK(fam3[0].max_value() > 0.5 * cap);

  CHECK_THROWS_AS(family_kind_from_name("nonsense"), std::invalid_argument);
}

TEST_CASE("necessity family powers the base weight cellwise") {
  const Mesh mesh{1, 1, 5};
  GridFunction v1 = GridFunction::abs_power(mesh, 1.2);  // |x|^{0.3 * p1}, p1 = 4
  FamilySpec spec;
  spec.kind = FamilyKind::necessity;
  spec.base = &v1;
  spec.exponent = -1.0 / (4.0 - 2.0);  // -1/(p1 - r)
  spec.box = Cube::interval(0.25, 0.75);
  auto fam = make_test_family(mesh, spec, 0);
  REQUIRE(fam.size() == 1);
  const long long i = mesh.cells_per_axis() / 2 + mesh.cells_per_axis() / 8;  // x ~ 0.5
  CHECK(fam[0].value(i) == doctest::Approx(std::pow(v1.value(i), spec.exponent)));
  CHECK(fam[0].value(0) == 0.0);
}
