#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "whitney/checks.hpp"
#include "whitney/datagen.hpp"
#include "whitney/errors.hpp"
#include "whitney/gamma.hpp"
#include "whitney/optim.hpp"
#include "whitney/wspd.hpp"

using namespace whitney;
using testing::line_data;
using testing::pt;

namespace {

struct Quadratic {
  Matrix Q;
  Vector c;
  double value(const Vector& x) const { return 0.5 * x.dot(Q * x) + c.dot(x); }
  Vector gradient(const Vector& x) const { return Q * x + c; }
  Matrix hessian(const Vector&) const { return Q; }
};

// t s x - log(1 - x) on x < 1, with s = +1 or -1.
struct ToyBarrier {
  double t;
  double sign;
  bool in_domain(const Vector& x) const { return x[0] < 1.0; }
  double value(const Vector& x) const { return sign * t * x[0] - std::log(1.0 - x[0]); }
  Vector gradient(const Vector& x) const { return pt({sign * t + 1.0 / (1.0 - x[0])}); }
  Matrix hessian(const Vector& x) const {
    Matrix h(1, 1);
    h(0, 0) = 1.0 / ((1.0 - x[0]) * (1.0 - x[0]));
    return h;
  }
};

FunctionData three_point() { return line_data({0, 1, 2}, {0, 1, 0}); }

Matrix diag(std::initializer_list<double> v) { return testing::pt(v).asDiagonal(); }

}  // namespace

TEST_CASE("constraint_values examples") {
  auto zero = full_problem(line_data({0, 1, 3}, {0, 0, 0}));
  CHECK(constraint_values(zero, Vector::Zero(3), 0.0).cwiseAbs().maxCoeff() == 0.0);

  auto p = full_problem(line_data({0, 1}, {0, 1}));
  auto c = constraint_values(p, pt({1, 1}), 0.0);
  REQUIRE(c.size() == 6);
  CHECK(c.cwiseAbs().maxCoeff() == 0.0);

  // beta = |y_j - y_k|^2 - M^2 r^2, the same for (j,k) and (k,j).
  auto r = full_problem(random_function_data(6, 2, 3));
  Vector Y = Vector::LinSpaced(12, -1.0, 2.0);
  auto v = constraint_values(r, Y, 0.7);
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    auto [j, k] = r.pairs[i];
    double r2 = (r.data.site(j) - r.data.site(k)).squaredNorm();
    double beta = (Y.segment(2 * j, 2) - Y.segment(2 * k, 2)).squaredNorm() - 0.49 * r2;
    CHECK(v[3 * i + 2] == doctest::Approx(beta).epsilon(1e-12));
    double alpha = Y.segment(2 * k, 2).dot(r.data.site(k) - r.data.site(j)) - 0.7 * r2 + r.data.value(j) -
                   r.data.value(k);
    CHECK(v[3 * i] == doctest::Approx(alpha).epsilon(1e-12));
  }
}

TEST_CASE("strictly_feasible_start") {
  auto zero = full_problem(line_data({0, 1, 3}, {0, 0, 0}));
  auto [Y0, M0] = strictly_feasible_start(zero);
  CHECK(Y0.isZero());
  CHECK(M0 == 1.0);

  auto aff = full_problem(line_data({0, 1}, {0, 1}));
  auto [Y1, M1] = strictly_feasible_start(aff);
  CHECK(constraint_values(aff, Y1, M1).maxCoeff() < 0.0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = full_problem(random_function_data(12, 1 + static_cast<int>(seed % 3), seed));
    auto [Y, M] = strictly_feasible_start(p);
    CHECK(constraint_values(p, Y, M).maxCoeff() < 0.0);
  }
}

TEST_CASE("newton_step on quadratics and a toy barrier") {
  Quadratic q1{diag({2.0}), pt({0.0})};
  CHECK(newton_step(q1, pt({1.0}))[0] == doctest::Approx(-1.0));
  Quadratic q2{diag({2.0, 8.0}), pt({0.0, 0.0})};
  auto dx = newton_step(q2, pt({1.0, 1.0}));
  CHECK(dx[0] == doctest::Approx(-1.0));
  CHECK(dx[1] == doctest::Approx(-1.0));

  // h' = t + 1/(1-x), h'' = 1/(1-x)^2.
  for (double x : {0.0, 0.5, -2.0}) {
    ToyBarrier b{1.0, 1.0};
    double expect = -(1.0 + 1.0 / (1.0 - x)) * (1.0 - x) * (1.0 - x);
    CHECK(newton_step(b, pt({x}))[0] == doctest::Approx(expect));
  }

  Matrix indefinite = diag({1.0, -1.0});
  CHECK_THROWS_AS(solve_newton_system(indefinite, pt({1.0, 1.0})), SolverError);
}

TEST_CASE("property: Newton converges in one step on quadratics") {
  Matrix B = Matrix::Random(5, 5);
  Quadratic q{B * B.transpose() + Matrix::Identity(5, 5), Vector::Random(5)};
  Vector x = Vector::Random(5);
  Vector next = x + newton_step(q, x);
  CHECK(q.gradient(next).norm() < 1e-10);
}

TEST_CASE("backtracking_line_search") {
  Quadratic q{diag({2.0, 8.0}), pt({0.0, 0.0})};
  Vector x = pt({1.0, 1.0});
  CHECK(backtracking_line_search(q, x, newton_step(q, x)) == 1.0);

  // Minimizing -10 x - log(1 - x) from 0: the Newton step overshoots the domain.
  ToyBarrier b{10.0, -1.0};
  Vector x0 = pt({0.0});
  Vector step = newton_step(b, x0);
  CHECK(x0[0] + step[0] > 1.0);
  double s = backtracking_line_search(b, x0, step);
  CHECK(s < 1.0);
  CHECK(x0[0] + s * step[0] < 1.0);
  CHECK(b.value(x0 + s * step) < b.value(x0));

  // An ascent direction never passes the Armijo test.
  CHECK_THROWS_AS(backtracking_line_search(q, x, q.gradient(x)), SolverError);
}

TEST_CASE("barrier_solve on affine data") {
  auto p = full_problem(line_data({0, 1}, {0, 1}));
  auto r = barrier_solve(p);
  CHECK(r.M <= 1e-6);
  CHECK(r.Y[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.Y[1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(constraint_values(p, r.Y, r.M).maxCoeff() <= 0.0);
  CHECK(r.report.mu == doctest::Approx(1.0 + 1.0 / std::sqrt(6.0)));
  CHECK(r.report.newton_steps <= r.report.step_bound);
}

TEST_CASE("barrier_solve on three points matches a pattern search") {
  auto data = three_point();
  auto p = full_problem(data);
  const double eps = 1e-6;
  BarrierOptions o;
  o.epsilon = eps;
  auto r = barrier_solve(p, o);
  auto best = oracle::pattern_search([&](const Vector& Y) { return oracle::gamma_tilde_of(data, Y); }, 3, -3.0, 3.0,
                                     24, 1e-4);
  CHECK(std::abs(r.M - best.value) <= eps + 1e-3);
  CHECK(r.M <= best.value + eps);
  double exact = oracle::gamma_tilde_min_1d(data);
  CHECK(r.M >= exact - 1e-9);
  CHECK(r.M <= exact + eps);
  CHECK(r.report.final_gap < eps);
  CHECK(constraint_values(p, r.Y, r.M).maxCoeff() <= 0.0);
  CHECK(r.report.newton_steps <= r.report.step_bound);
  CHECK(r.report.step_bound == doctest::Approx(newton_step_bound(r.report.m, 1.0, eps, 0.25, 0.5)));
}

TEST_CASE("barrier_solve validates its options") {
  BarrierOptions o;
  o.epsilon = 0.0;
  CHECK_THROWS_AS(barrier_solve(full_problem(three_point()), o), ValidationError);
}

TEST_CASE("solve_function_problem on affine data") {
  FunctionData data(2, {pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({2, 3})}, {1, 3, 0, 1 + 2 * 2 - 3});
  auto fit = solve_function_problem(data, 1e-6, PairMode::Full);
  CHECK(fit.M_tilde <= 1e-6);
  CHECK(fit.gamma1_of_field <= 1e-4);
  auto aff = affine_fit(data);
  REQUIRE(aff.has_value());
  CHECK(gamma1_exact(*aff).value < 1e-12);
  CHECK_FALSE(affine_fit(three_point()).has_value());
}

TEST_CASE("solve_function_problem on three points") {
  auto data = three_point();
  const double eps = 1e-6;
  auto fit = solve_function_problem(data, eps, PairMode::Full);
  for (int k = 0; k < 3; ++k) CHECK(fit.field.value(k) == data.value(k));
  CHECK(fit.C == doctest::Approx(2 * (1 + std::sqrt(2.0))));
  // Grid estimate of min over gradients of gamma1_exact.
  auto best = oracle::pattern_search([&](const Vector& Y) { return oracle::gamma1_of(data, Y); }, 3, -4.0, 4.0, 32,
                                     1e-5);
  CHECK(fit.gamma1_of_field >= best.value - 1e-3);
  CHECK(fit.M / fit.C - 2 * eps <= best.value + 1e-3);
  CHECK(best.value <= fit.M);
}

TEST_CASE("wspd mode against full mode") {
  auto data = random_function_data(50, 2, 7);
  const double eps = 1e-6, sep = 0.5;
  auto full = solve_function_problem(data, eps, PairMode::Full);
  auto wspd = solve_function_problem(data, eps, PairMode::Wspd, sep);
  CHECK(wspd.C == doctest::Approx(approx_constant(sep)));
  CHECK(wspd.M_tilde <= full.M_tilde + eps);
  CHECK(full.M_tilde <= (3 + 23 * sep) * (wspd.M_tilde + eps));
  CHECK(wspd.M >= full.M / approx_constant(sep) - 2 * eps);
}

TEST_CASE("property: the optimum is feasible and tight") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto data = random_function_data(8 + static_cast<int>(seed), 1 + static_cast<int>(seed % 3), 20 + seed);
    const double eps = 1e-6;
    for (PairMode mode : {PairMode::Full, PairMode::Wspd}) {
      auto p = mode == PairMode::Full ? full_problem(data) : wspd_problem(data);
      BarrierOptions o;
      o.epsilon = eps;
      auto r = barrier_solve(p, o);
      CHECK(constraint_values(p, r.Y, r.M).maxCoeff() <= 0.0);
      OneField field(data.dim(), data.sites(), [&] {
        std::vector<Jet> j;
        for (int k = 0; k < data.size(); ++k) j.push_back({data.value(k), r.Y.segment(k * data.dim(), data.dim())});
        return j;
      }());
      CHECK(std::abs(pairwise_tilde(field, p.pairs) - r.M) <= 1e-6 + eps);
      if (mode == PairMode::Full) {
        CHECK(std::abs(gamma1_tilde(field) - r.M) <= 1e-6 + eps);
        CHECK(std::abs(oracle::gamma_tilde_of(data, r.Y) - r.M) <= 1e-6 + eps);
      }
      CHECK(r.report.newton_steps <= r.report.step_bound);
    }
  }
}

TEST_CASE("property: more pairs never lower the optimum") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto data = random_function_data(20, 2, 40 + seed);
    auto full = barrier_solve(full_problem(data));
    auto restricted = barrier_solve(wspd_problem(data));
    CHECK(restricted.M <= full.M + 1e-6);
  }
}

TEST_CASE("property: the duality gap bounds the error on tiny instances") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto data = random_function_data(3 + static_cast<int>(seed % 2), 1, 60 + seed);
    BarrierOptions o;
    o.epsilon = 1e-6;
    auto r = barrier_solve(full_problem(data), o);
    double exact = oracle::gamma_tilde_min_1d(data);
    CHECK(r.M >= exact - 1e-9);
    CHECK(r.M <= exact + o.epsilon);
  }
}

TEST_CASE("property: sparse and dense factorizations agree") {
  auto data = random_function_data(15, 2, 80);
  auto p = full_problem(data);
  BarrierOptions dense, sparse;
  sparse.factorization = Factorization::Sparse;
  auto a = barrier_solve(p, dense), b = barrier_solve(p, sparse);
  CHECK(a.M == doctest::Approx(b.M).epsilon(1e-6));
  BarrierObjective obj(p, 3.0);
  auto [Y, M] = strictly_feasible_start(p);
  Vector x = pack_variables(Y, M);
  CHECK((Matrix(obj.hessian_sparse(x)) - obj.hessian(x)).norm() <= 1e-12 * obj.hessian(x).norm());
}

TEST_CASE("barrier objective derivatives match finite differences") {
  auto p = full_problem(random_function_data(5, 2, 90));
  BarrierObjective obj(p, 2.0);
  auto [Y, M] = strictly_feasible_start(p);
  Vector x = pack_variables(Y, M);
  Vector g = obj.gradient(x);
  Matrix H = obj.hessian(x);
  const double h = 1e-6;
  for (int i = 0; i < x.size(); ++i) {
    Vector e = Vector::Unit(x.size(), i) * h;
    CHECK((obj.value(x + e) - obj.value(x - e)) / (2 * h) == doctest::Approx(g[i]).epsilon(1e-5).scale(1));
    Vector col = (obj.gradient(x + e) - obj.gradient(x - e)) / (2 * h);
    CHECK((col - H.col(i)).norm() <= 1e-5 * (1 + H.col(i).norm()));
  }
}
