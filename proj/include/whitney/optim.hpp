#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "whitney/core.hpp"

namespace whitney {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Minimize M over (Y, M) subject to alpha+, alpha-, beta <= 0 for every listed pair.
struct QcqpProblem {
  FunctionData data;
  std::vector<std::pair<int, int>> pairs;  // ordered, j != k

  int dim() const { return data.dim(); }
  int num_variables() const { return data.dim() * data.size() + 1; }
  int num_constraints() const { return 3 * static_cast<int>(pairs.size()); }
};

// All ordered pairs j != k.
QcqpProblem full_problem(const FunctionData& data);
// Pairs touched by the six representative families of a separated-pair decomposition.
QcqpProblem wspd_problem(const FunctionData& data, double eps_sep = 0.5);

// Variables are stacked as x = (y_1, ..., y_N, M).
Vector pack_variables(const Vector& Y, double M);

// alpha+, alpha-, beta per pair, in pair order.
Vector constraint_values(const QcqpProblem& problem, const Vector& Y, double M);

// Y = 0 and M one above the largest value that makes some constraint vanish.
std::pair<Vector, double> strictly_feasible_start(const QcqpProblem& problem);

template <class F>
concept SmoothFunction = requires(const F& f, const Vector& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<Vector>;
  { f.hessian(x) } -> std::convertible_to<Matrix>;
};

// Cholesky solve of H dx = -g. A tiny diagonal shift is tried before reporting FactorizationFailure.
Vector solve_newton_system(const Matrix& H, const Vector& g);
Vector solve_newton_system(const SparseMatrix& H, const Vector& g);

template <SmoothFunction F>
Vector newton_step(const F& f, const Vector& x) {
  return solve_newton_system(f.hessian(x), f.gradient(x));
}

constexpr double kStepUnderflow = 1e-20;

// Shrinks s by beta until x + s dx is in the domain and the Armijo test holds.
// Objectives may provide in_domain(x) and a cancellation-free decrease(x, dx, s) = f(x + s dx) - f(x).
template <SmoothFunction F>
double backtracking_line_search(const F& f, const Vector& x, const Vector& dx, double alpha = 0.25,
                                double beta = 0.5) {
  if (!(alpha > 0.0 && alpha < 0.5) || !(beta > 0.0 && beta < 1.0)) {
    throw ValidationError(ValidationCode::BadParameter, "line search parameters out of range");
  }
  const double slope = f.gradient(x).dot(dx);
  double s = 1.0;
  if constexpr (requires { f.in_domain(x); }) {
    while (!f.in_domain(x + s * dx)) {
      s *= beta;
      if (s < kStepUnderflow) throw SolverError(SolverCode::StepUnderflow, "line search left the domain");
    }
  }
  const double f0 = f.value(x);
  while (true) {
    double diff;
    if constexpr (requires { f.decrease(x, dx, s); }) {
      diff = f.decrease(x, dx, s);
    } else {
      diff = f.value(x + s * dx) - f0;
    }
    // A non-descent direction is never accepted, so it ends in StepUnderflow.
    if (slope < 0.0 && diff <= alpha * s * slope) return s;
    s *= beta;
    if (s < kStepUnderflow) throw SolverError(SolverCode::StepUnderflow, "line search step underflow");
  }
}

// t M - sum log(-h_i) over the constraints of a problem.
class BarrierObjective {
 public:
  BarrierObjective(const QcqpProblem& problem, double t);

  void set_t(double t) { t_ = t; }
  double t() const { return t_; }

  bool in_domain(const Vector& x) const;
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  SparseMatrix hessian_sparse(const Vector& x) const;
  double decrease(const Vector& x, const Vector& dx, double s) const;

 private:
  void triplets(const Vector& x, std::vector<Eigen::Triplet<double>>& out) const;

  const QcqpProblem& problem_;
  double t_;
  std::vector<Vector> e_;     // a_k - a_j per pair
  std::vector<double> r2_;    // |a_j - a_k|^2
  std::vector<double> df_;    // f_j - f_k
};

enum class Factorization { Dense, Sparse };

struct BarrierOptions {
  double epsilon = 1e-6;
  double mu = 0.0;  // <= 1 selects 1 + 1/sqrt(m)
  double t0 = 1.0;
  double alpha = 0.25;
  double beta = 0.5;
  double inner_tolerance = 1e-10;  // on (Newton decrement)^2 / 2
  long max_newton_steps = 0;       // 0: twice the step bound, at least 10^4
  Factorization factorization = Factorization::Dense;
};

struct SolverReport {
  int m = 0;
  double mu = 0.0;
  long outer_iterations = 0;
  long newton_steps = 0;
  double barrier_degree = 0.0;  // sum of the barrier degrees; the duality gap is barrier_degree / t
  double final_gap = 0.0;       // barrier_degree / t at exit
  double max_constraint = 0.0;
  double step_bound = 0.0;
  double seconds = 0.0;
};

struct BarrierResult {
  double M = 0.0;
  Vector Y;
  SolverReport report;
};

// C (1 + log2(m / (t0 eps)) sqrt(m)), C = (10 - 4 alpha)/(alpha beta (1 - 2 alpha)^2) + log2 log2(1/eps).
double newton_step_bound(int m, double t0, double epsilon, double alpha, double beta);

BarrierResult barrier_solve(const QcqpProblem& problem, const BarrierOptions& options = {});

enum class PairMode { Full, Wspd };

struct FunctionFit {
  double M = 0.0;        // C times the minimized value
  double M_tilde = 0.0;  // minimized value
  double C = 0.0;
  OneField field;        // sites with the fitted gradients
  double gamma1_of_field = 0.0;
  SolverReport report;
};

// Gradient of the least-squares affine fit, attached to every site, if the data pass is_affine with it.
std::optional<OneField> affine_fit(const FunctionData& data);

FunctionFit solve_function_problem(const FunctionData& data, double epsilon, PairMode mode,
                                   double eps_sep = 0.5, Factorization factorization = Factorization::Dense);

}  // namespace whitney
