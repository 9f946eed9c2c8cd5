#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "whitney/checks.hpp"
#include "whitney/datagen.hpp"
#include "whitney/errors.hpp"
#include "whitney/eval.hpp"
#include "whitney/gamma.hpp"
#include "whitney/locator_tree.hpp"
#include "whitney/wells.hpp"

using namespace whitney;
using testing::pt;

namespace {

WellsModel random_model(int n, int d, std::uint64_t seed) {
  auto f = random_instance(n, d, seed).field;
  return build_model(f, gamma1_exact(f).value);
}

// First cell containing x with no tolerance.
int strict_cell(const WellsModel& m, const Point& x) {
  for (std::size_t c = 0; c < m.cells.size(); ++c)
    if (cell_contains(m.cells[c], x, 0.0)) return static_cast<int>(c);
  return -1;
}

Point uniform_in(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Point x(box.lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * u(rng);
  return x;
}

}  // namespace

TEST_CASE("locate on the two-point model") {
  auto m = build_model(testing::two_point(), 4.0);
  CHECK(locate(m, pt({0.75})) == *m.lattice.find({0, 1}));
  CHECK(locate(m, pt({-3.0})) == *m.lattice.find({0}));
  CHECK(locate(m, pt({3.0})) == *m.lattice.find({1}));
  // Boundary points go to the lowest cell index.
  CHECK(locate(m, pt({0.5})) == std::min(*m.lattice.find({0}), *m.lattice.find({0, 1})));
  CHECK_THROWS_AS(locate(m, pt({0.5, 0.5})), ValidationError);
}

TEST_CASE("locate agrees with an exhaustive scan") {
  auto m = random_model(30, 2, 11);
  std::mt19937_64 rng(2);
  Box box = sample_region(m.field, 0.5);
  for (int t = 0; t < 2000; ++t) {
    Point x = uniform_in(box, rng);
    int c = locate(m, x);
    CHECK(cell_contains(m.cells[c], x));
    for (int k = 0; k < c; ++k) CHECK_FALSE(cell_contains(m.cells[k], x));
  }
}

TEST_CASE("split_point at the anchor and at cell vertices") {
  auto f = random_instance(3, 2, 21).field;
  auto m = build_model(f, gamma1_exact(f).value);
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const auto& cell = m.cells[c];
    auto [y0, z0] = split_point(cell, cell.anchor);
    CHECK((y0 - cell.anchor).norm() < 1e-12);
    CHECK((z0 - cell.anchor).norm() < 1e-12);
    const auto& face = m.lattice.faces[cell.face];
    for (int v : face.vertices) {
      for (int q : face.dual_vertices) {
        const Point& rho = m.lattice.dual_vertices[q].position;
        auto [y, z] = split_point(cell, 0.5 * (m.shifted[v] + rho));
        double s = 1 + rho.norm();
        CHECK((y - m.shifted[v]).norm() < 1e-10 * s);
        CHECK((z - rho).norm() < 1e-10 * s);
      }
    }
  }
}

TEST_CASE("split_point reconstructs the query") {
  auto m = random_model(40, 3, 8);
  std::mt19937_64 rng(9);
  Box box = sample_region(m.field);
  for (int t = 0; t < 500; ++t) {
    Point x = uniform_in(box, rng);
    auto [y, z] = split_point(m.cells[locate(m, x)], x);
    CHECK((0.5 * (y + z) - x).norm() < 1e-10 * (1 + x.norm()));
  }
}

TEST_CASE("evaluate reproduces the jets at the sites") {
  for (int d = 1; d <= 4; ++d) {
    auto m = random_model(32, d, 700 + d);
    for (int a = 0; a < m.field.size(); ++a) {
      auto q = evaluate(m, m.field.site(a));
      CHECK(std::abs(q.value - m.field.value(a)) <= 1e-10);
      CHECK((q.gradient - m.field.gradient(a)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("evaluate on the two-point model") {
  auto m = build_model(testing::two_point(), 4.0);
  // Hand-derived pieces: 2x^2, 1 - 2(x-1)^2, 1 + 2(x-1)^2.
  for (double x : {-2.0, 0.0, 0.3, 0.5}) {
    auto q = evaluate(m, pt({x}));
    CHECK(q.value == doctest::Approx(2 * x * x));
    CHECK(q.gradient[0] == doctest::Approx(4 * x));
  }
  for (double x : {0.5, 0.75, 1.0}) {
    auto q = evaluate(m, pt({x}));
    CHECK(q.value == doctest::Approx(1 - 2 * (x - 1) * (x - 1)));
    CHECK(q.gradient[0] == doctest::Approx(-4 * (x - 1)));
  }
  for (double x : {1.0, 2.0, 10.0}) CHECK(evaluate(m, pt({x})).value == doctest::Approx(1 + 2 * (x - 1) * (x - 1)));

  // Both neighbours agree at x = 1/2.
  int left = *m.lattice.find({0}), mid = *m.lattice.find({0, 1});
  auto a = evaluate_in_cell(m, left, pt({0.5})), b = evaluate_in_cell(m, mid, pt({0.5}));
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
  CHECK(a.gradient[0] == doctest::Approx(b.gradient[0]).epsilon(1e-14));
}

TEST_CASE("evaluate on an affine model") {
  auto f = testing::affine_field(12, 3, 4);
  auto m = build_model(f, 0.0);
  CHECK(m.affine);
  std::mt19937_64 rng(1);
  for (const auto& x : testing::random_points(100, 3, 5, -10, 10)) {
    auto q = evaluate(m, x);
    CHECK(q.value == doctest::Approx(jet_eval(f.jet(0), f.site(0), x)).epsilon(1e-12));
    CHECK((q.gradient - f.gradient(0)).norm() < 1e-12);
  }
}

TEST_CASE("locator tree agrees with the scan") {
  auto m = build_model(testing::two_point(), 4.0);
  auto tree = LocatorTree::build(m);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 4);
  for (int t = 0; t < 1000; ++t) {
    Point x = pt({u(rng)});
    CHECK(tree.locate(m, x) == locate(m, x));
  }

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto r = random_model(60, 2, 800 + seed);
    auto tr = LocatorTree::build(r);
    Box box = sample_region(r.field, 0.5);
    for (int t = 0; t < 1000; ++t) {
      Point x = uniform_in(box, rng);
      auto found = tr.find(r, x);
      REQUIRE(found.has_value());
      CHECK(cell_contains(r.cells[*found], x));
      CHECK(tr.evaluate(r, x).value == doctest::Approx(evaluate(r, x).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("locator tree of a single cell is one leaf") {
  auto m = build_model(testing::affine_field(5, 2, 3), 0.0);
  auto tree = LocatorTree::build(m);
  CHECK(tree.node_count() == 1);
  CHECK(tree.leaf_count() == 1);
}

TEST_CASE("property: value and gradient are continuous across cell boundaries") {
  std::mt19937_64 rng(12);
  for (int d = 1; d <= 3; ++d) {
    auto m = random_model(30, d, 900 + d);
    Box box = sample_region(m.field);
    int boundaries = 0;
    for (int t = 0; t < 400; ++t) {
      Point x = uniform_in(box, rng), y = uniform_in(box, rng);
      int cx = strict_cell(m, x), cy = strict_cell(m, y);
      if (cx < 0 || cy < 0 || cx == cy) continue;
      // Bisect down to a cell change; the tolerance-free test keeps x inside cx.
      for (int it = 0; it < 60; ++it) {
        Point mid = 0.5 * (x + y);
        int cm = strict_cell(m, mid);
        if (cm == cx) {
          x = mid;
        } else {
          y = mid;
          cy = cm;
        }
      }
      if (cy < 0) continue;
      auto a = evaluate_in_cell(m, cx, x), b = evaluate_in_cell(m, cy, x);
      CHECK(std::abs(a.value - b.value) < 1e-8);
      CHECK((a.gradient - b.gradient).norm() < 1e-8);
      ++boundaries;
    }
    CHECK(boundaries > 50);
  }
}

TEST_CASE("property: per-cell Hessian is M (P_E - P_H)") {
  for (int d = 2; d <= 3; ++d) {
    auto m = random_model(20, d, 1000 + d);
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
      const Point& x = m.cells[c].centroid;
      const double h = 1e-3 * (1 + x.norm());
      Matrix H(d, d);
      for (int i = 0; i < d; ++i) {
        Vector e = Vector::Unit(d, i) * h;
        H.col(i) = (evaluate_in_cell(m, static_cast<int>(c), x + e).gradient -
                    evaluate_in_cell(m, static_cast<int>(c), x - e).gradient) /
                   (2 * h);
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
      Vector ev = es.eigenvalues();
      int j = m.cells[c].dim;
      for (int i = 0; i < d; ++i) {
        double expect = i < j ? -m.M : m.M;
        CHECK(std::abs(ev[i] - expect) <= 1e-4 * m.M);
      }
    }
  }
}

TEST_CASE("property: gradient Lipschitz constant is M") {
  std::mt19937_64 rng(13);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto m = random_model(32, 2, 1100 + seed);
    auto r = check_lipschitz(m, rng, 20000);
    CHECK(r.passed);
    CHECK(r.worst >= 0.9 * m.M);
  }
  // Independent spot check on uniform pairs: never above M.
  auto m = random_model(32, 2, 1200);
  Box box = sample_region(m.field);
  for (int t = 0; t < 5000; ++t) {
    Point x = uniform_in(box, rng), y = uniform_in(box, rng);
    CHECK((evaluate(m, x).gradient - evaluate(m, y).gradient).norm() <= m.M * (x - y).norm() * (1 + 1e-8));
  }
}

TEST_CASE("model check suites pass on random models") {
  for (int d = 1; d <= 3; ++d) {
    auto m = random_model(24, d, 1300 + d);
    CheckOptions o;
    o.lipschitz_pairs = 20000;
    auto results = run_model_suites(m, o);
    for (const auto& r : results) {
      INFO(format_result(r));
      CHECK(r.passed);
    }
  }
}
