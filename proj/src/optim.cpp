#include "whitney/optim.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "whitney/gamma.hpp"
#include "whitney/wspd.hpp"

namespace whitney {

QcqpProblem full_problem(const FunctionData& data) {
  require_valid(data);
  QcqpProblem p{data, {}};
  for (int j = 0; j < data.size(); ++j) {
    for (int k = 0; k < data.size(); ++k) {
      if (j != k) p.pairs.emplace_back(j, k);
    }
  }
  return p;
}

QcqpProblem wspd_problem(const FunctionData& data, double eps_sep) {
  require_valid(data);
  return {data, restricted_pairs(build_wspd(data.sites(), eps_sep))};
}

Vector pack_variables(const Vector& Y, double M) {
  Vector x(Y.size() + 1);
  x.head(Y.size()) = Y;
  x[Y.size()] = M;
  return x;
}

Vector constraint_values(const QcqpProblem& problem, const Vector& Y, double M) {
  const int d = problem.dim();
  if (Y.size() != d * problem.data.size()) {
    throw ValidationError(ValidationCode::DimensionMismatch, "constraint_values: Y has the wrong length");
  }
  Vector out(problem.num_constraints());
  int i = 0;
  for (auto [j, k] : problem.pairs) {
    const Point& aj = problem.data.site(j);
    const Point& ak = problem.data.site(k);
    auto yj = Y.segment(j * d, d);
    auto yk = Y.segment(k * d, d);
    double r2 = (aj - ak).squaredNorm();
    double fj = problem.data.value(j), fk = problem.data.value(k);
    out[i++] = yk.dot(ak - aj) - M * r2 + fj - fk;
    out[i++] = yk.dot(aj - ak) - M * r2 + fk - fj;
    out[i++] = yj.squaredNorm() + yk.squaredNorm() - 2.0 * yj.dot(yk) - M * M * r2;
  }
  return out;
}

std::pair<Vector, double> strictly_feasible_start(const QcqpProblem& problem) {
  const int n = problem.data.size();
  Vector Y = Vector::Zero(problem.dim() * n);
  // With Y = 0 the alpha constraints vanish at M = |f_j - f_k| / r^2 and beta at M = 0.
  double needed = 0.0;
  for (auto [j, k] : problem.pairs) {
    double r2 = (problem.data.site(j) - problem.data.site(k)).squaredNorm();
    needed = std::max(needed, std::abs(problem.data.value(j) - problem.data.value(k)) / r2);
  }
  return {Y, 1.0 + needed};
}

namespace {

template <class Solver, class Mat>
bool try_solve(Solver& solver, const Mat& H, const Vector& g, Vector& dx) {
  solver.compute(H);
  if (solver.info() != Eigen::Success) return false;
  dx = solver.solve(-g);
  return dx.allFinite();
}

}  // namespace

Vector solve_newton_system(const Matrix& H, const Vector& g) {
  Eigen::LLT<Matrix> llt;
  Vector dx;
  if (try_solve(llt, H, g, dx)) return dx;
  // Directions the constraints do not see (affinely degenerate sites) leave H singular.
  const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  for (double shift = 1e-14; shift <= 1e-6; shift *= 100.0) {
    Matrix Hs = H;
    Hs.diagonal().array() += shift * scale;
    if (try_solve(llt, Hs, g, dx)) return dx;
  }
  throw SolverError(SolverCode::FactorizationFailure, "Newton system is not positive definite");
}

Vector solve_newton_system(const SparseMatrix& H, const Vector& g) {
  Eigen::SimplicialLLT<SparseMatrix> llt;
  Vector dx;
  if (try_solve(llt, H, g, dx)) return dx;
  double scale = 1.0;
  for (int i = 0; i < H.rows(); ++i) scale = std::max(scale, std::abs(H.coeff(i, i)));
  for (double shift = 1e-14; shift <= 1e-6; shift *= 100.0) {
    SparseMatrix I(H.rows(), H.cols());
    I.setIdentity();
    SparseMatrix Hs = H + (shift * scale) * I;
    if (try_solve(llt, Hs, g, dx)) return dx;
  }
  throw SolverError(SolverCode::FactorizationFailure, "Newton system is not positive definite");
}

BarrierObjective::BarrierObjective(const QcqpProblem& problem, double t) : problem_(problem), t_(t) {
  for (auto [j, k] : problem.pairs) {
    e_.push_back(problem.data.site(k) - problem.data.site(j));
    r2_.push_back(e_.back().squaredNorm());
    df_.push_back(problem.data.value(j) - problem.data.value(k));
  }
}

bool BarrierObjective::in_domain(const Vector& x) const {
  const int d = problem_.dim();
  const double M = x[x.size() - 1];
  for (std::size_t p = 0; p < problem_.pairs.size(); ++p) {
    auto [j, k] = problem_.pairs[p];
    double lin = x.segment(k * d, d).dot(e_[p]);
    double mr = M * r2_[p];
    if (!(lin - mr + df_[p] < 0.0) || !(-lin - mr - df_[p] < 0.0)) return false;
    double u2 = (x.segment(j * d, d) - x.segment(k * d, d)).squaredNorm();
    if (!(u2 - M * M * r2_[p] < 0.0)) return false;
  }
  return true;
}

double BarrierObjective::value(const Vector& x) const {
  if (!in_domain(x)) return std::numeric_limits<double>::infinity();
  const int d = problem_.dim();
  const double M = x[x.size() - 1];
  double v = t_ * M;
  for (std::size_t p = 0; p < problem_.pairs.size(); ++p) {
    auto [j, k] = problem_.pairs[p];
    double lin = x.segment(k * d, d).dot(e_[p]);
    double mr = M * r2_[p];
    double u2 = (x.segment(j * d, d) - x.segment(k * d, d)).squaredNorm();
    v -= std::log(-(lin - mr + df_[p])) + std::log(-(-lin - mr - df_[p])) + std::log(-(u2 - M * M * r2_[p]));
  }
  return v;
}

Vector BarrierObjective::gradient(const Vector& x) const {
  const int d = problem_.dim();
  const Eigen::Index mi = x.size() - 1;
  const double M = x[mi];
  Vector g = Vector::Zero(x.size());
  g[mi] = t_;
  for (std::size_t p = 0; p < problem_.pairs.size(); ++p) {
    auto [j, k] = problem_.pairs[p];
    double lin = x.segment(k * d, d).dot(e_[p]);
    double mr = M * r2_[p];
    double hp = lin - mr + df_[p];
    double hm = -lin - mr - df_[p];
    Vector u = x.segment(j * d, d) - x.segment(k * d, d);
    double hb = u.squaredNorm() - M * M * r2_[p];
    // grad of -log(-h) is grad(h) / (-h)
    g.segment(k * d, d) += e_[p] / (-hp) - e_[p] / (-hm);
    g[mi] += -r2_[p] / (-hp) - r2_[p] / (-hm) - 2.0 * M * r2_[p] / (-hb);
    g.segment(j * d, d) += 2.0 * u / (-hb);
    g.segment(k * d, d) -= 2.0 * u / (-hb);
  }
  return g;
}

void BarrierObjective::triplets(const Vector& x, std::vector<Eigen::Triplet<double>>& out) const {
  const int d = problem_.dim();
  const int mi = static_cast<int>(x.size()) - 1;
  const double M = x[mi];
  out.clear();
  out.reserve(problem_.pairs.size() * static_cast<std::size_t>((2 * d + 1) * (2 * d + 1) + 2 * (d + 1) * (d + 1)));
  std::vector<int> idx(2 * d + 1);
  Vector grad(2 * d + 1);
  for (std::size_t p = 0; p < problem_.pairs.size(); ++p) {
    auto [j, k] = problem_.pairs[p];
    double lin = x.segment(k * d, d).dot(e_[p]);
    double mr = M * r2_[p];
    Vector u = x.segment(j * d, d) - x.segment(k * d, d);
    double hb = u.squaredNorm() - M * M * r2_[p];
    // Rank-one terms of the two linear constraints on (y_k, M).
    for (int sign : {1, -1}) {
      double h = sign * lin - mr + sign * df_[p];
      double w = 1.0 / (h * h);
      for (int a = 0; a <= d; ++a) {
        int ia = a < d ? k * d + a : mi;
        double ga = a < d ? sign * e_[p][a] : -r2_[p];
        for (int b = 0; b <= d; ++b) {
          int ib = b < d ? k * d + b : mi;
          double gb = b < d ? sign * e_[p][b] : -r2_[p];
          out.emplace_back(ia, ib, w * ga * gb);
        }
      }
    }
    // beta on (y_j, y_k, M): rank-one term plus its own Hessian over -h.
    for (int a = 0; a < d; ++a) {
      idx[a] = j * d + a;
      idx[d + a] = k * d + a;
      grad[a] = 2.0 * u[a];
      grad[d + a] = -2.0 * u[a];
    }
    idx[2 * d] = mi;
    grad[2 * d] = -2.0 * M * r2_[p];
    double w = 1.0 / (hb * hb);
    for (int a = 0; a <= 2 * d; ++a) {
      for (int b = 0; b <= 2 * d; ++b) out.emplace_back(idx[a], idx[b], w * grad[a] * grad[b]);
    }
    double c = 1.0 / (-hb);
    for (int a = 0; a < d; ++a) {
      out.emplace_back(j * d + a, j * d + a, 2.0 * c);
      out.emplace_back(k * d + a, k * d + a, 2.0 * c);
      out.emplace_back(j * d + a, k * d + a, -2.0 * c);
      out.emplace_back(k * d + a, j * d + a, -2.0 * c);
    }
    out.emplace_back(mi, mi, -2.0 * r2_[p] * c);
  }
}

SparseMatrix BarrierObjective::hessian_sparse(const Vector& x) const {
  std::vector<Eigen::Triplet<double>> t;
  triplets(x, t);
  SparseMatrix H(x.size(), x.size());
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

Matrix BarrierObjective::hessian(const Vector& x) const { return Matrix(hessian_sparse(x)); }

double BarrierObjective::decrease(const Vector& x, const Vector& dx, double s) const {
  const int d = problem_.dim();
  const Eigen::Index mi = x.size() - 1;
  const double M = x[mi];
  const double dM = dx[mi];
  double total = t_ * s * dM;
  for (std::size_t p = 0; p < problem_.pairs.size(); ++p) {
    auto [j, k] = problem_.pairs[p];
    double lin = x.segment(k * d, d).dot(e_[p]);
    double dlin = dx.segment(k * d, d).dot(e_[p]);
    double mr = M * r2_[p];
    double hp = lin - mr + df_[p];
    double hm = -lin - mr - df_[p];
    double dp = s * (dlin - dM * r2_[p]);
    double dm = s * (-dlin - dM * r2_[p]);
    Vector u = x.segment(j * d, d) - x.segment(k * d, d);
    Vector du = dx.segment(j * d, d) - dx.segment(k * d, d);
    double hb = u.squaredNorm() - M * M * r2_[p];
    double db = 2.0 * s * u.dot(du) + s * s * du.squaredNorm() - r2_[p] * (2.0 * s * M * dM + s * s * dM * dM);
    // -log(-(h + delta)) + log(-h) = -log1p(delta / h)
    total -= std::log1p(dp / hp) + std::log1p(dm / hm) + std::log1p(db / hb);
  }
  return total;
}

double newton_step_bound(int m, double t0, double epsilon, double alpha, double beta) {
  double c = (10.0 - 4.0 * alpha) / (alpha * beta * (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha)) +
             std::log2(std::log2(1.0 / epsilon));
  return c * (1.0 + std::log2(m / (t0 * epsilon)) * std::sqrt(static_cast<double>(m)));
}

BarrierResult barrier_solve(const QcqpProblem& problem, const BarrierOptions& options) {
  if (!(options.epsilon > 0.0)) throw ValidationError(ValidationCode::BadParameter, "epsilon must be positive");
  auto start = std::chrono::steady_clock::now();
  BarrierResult result;
  const int m = problem.num_constraints();
  auto [Y0, M0] = strictly_feasible_start(problem);
  if (m == 0) {
    result.Y = Y0;
    result.M = 0.0;
    return result;
  }
  const double mu = options.mu > 1.0 ? options.mu : 1.0 + 1.0 / std::sqrt(static_cast<double>(m));
  SolverReport& rep = result.report;
  rep.m = m;
  rep.mu = mu;
  rep.step_bound = newton_step_bound(m, options.t0, options.epsilon, options.alpha, options.beta);
  const long max_steps = options.max_newton_steps > 0
                             ? options.max_newton_steps
                             : std::max<long>(10000, static_cast<long>(2.0 * rep.step_bound));

  // Each alpha barrier has degree 1; each beta barrier is the second-order cone barrier, of degree 2.
  const double degree = 4.0 * static_cast<double>(problem.pairs.size());
  rep.barrier_degree = degree;
  Vector x = pack_variables(Y0, M0);
  BarrierObjective objective(problem, options.t0);
  double t = options.t0;
  while (true) {
    // Centering by damped Newton.
    while (true) {
      Vector g = objective.gradient(x);
      Vector dx = options.factorization == Factorization::Dense
                      ? solve_newton_system(objective.hessian(x), g)
                      : solve_newton_system(objective.hessian_sparse(x), g);
      double decrement2 = -g.dot(dx);
      if (decrement2 / 2.0 <= options.inner_tolerance) break;
      double s = backtracking_line_search(objective, x, dx, options.alpha, options.beta);
      x += s * dx;
      if (++rep.newton_steps > max_steps) {
        throw SolverError(SolverCode::MaxIterations, "barrier method exceeded its Newton step budget");
      }
    }
    ++rep.outer_iterations;
    if (degree / t < options.epsilon) break;
    t *= mu;
    objective.set_t(t);
  }
  rep.final_gap = degree / t;
  const Eigen::Index n = x.size() - 1;
  result.Y = x.head(n);
  result.M = x[n];
  rep.max_constraint = constraint_values(problem, result.Y, result.M).maxCoeff();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

FunctionFit solve_function_problem(const FunctionData& data, double epsilon, PairMode mode, double eps_sep,
                                   Factorization factorization) {
  require_valid(data);
  QcqpProblem problem = mode == PairMode::Full ? full_problem(data) : wspd_problem(data, eps_sep);
  BarrierOptions options;
  options.epsilon = epsilon;
  options.factorization = factorization;
  BarrierResult solved = barrier_solve(problem, options);
  FunctionFit fit;
  fit.M_tilde = solved.M;
  fit.C = mode == PairMode::Full ? 2.0 * (1.0 + std::sqrt(2.0)) : approx_constant(eps_sep);
  fit.M = fit.C * fit.M_tilde;
  const int d = data.dim();
  std::vector<Jet> jets;
  for (int k = 0; k < data.size(); ++k) jets.push_back({data.value(k), solved.Y.segment(k * d, d)});
  fit.field = OneField(d, data.sites(), std::move(jets));
  fit.gamma1_of_field = gamma1_exact(fit.field).value;
  fit.report = solved.report;
  return fit;
}

std::optional<OneField> affine_fit(const FunctionData& data) {
  require_valid(data);
  const int n = data.size(), d = data.dim();
  Matrix A(n, d + 1);
  Vector f(n);
  for (int k = 0; k < n; ++k) {
    A(k, 0) = 1.0;
    A.row(k).tail(d) = (data.site(k) - data.site(0)).transpose();
    f[k] = data.value(k);
  }
  Vector g = Vector::Zero(d);
  if (n > 1) g = A.colPivHouseholderQr().solve(f).tail(d);
  std::vector<Jet> jets;
  for (int k = 0; k < n; ++k) jets.push_back({data.value(k), g});
  OneField field(d, data.sites(), std::move(jets));
  if (!is_affine(field)) return std::nullopt;
  return field;
}

}  // namespace whitney
