#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace oracle {

double gamma1_sup(const OneField& field, const std::vector<Point>& probes) {
  double best = 0.0;
  const int n = field.size();
  for (const Point& x : probes) {
    for (int a = 0; a < n; ++a) {
      double pa = field.value(a) + field.gradient(a).dot(x - field.site(a));
      for (int b = a + 1; b < n; ++b) {
        double pb = field.value(b) + field.gradient(b).dot(x - field.site(b));
        double den = (field.site(a) - x).squaredNorm() + (field.site(b) - x).squaredNorm();
        best = std::max(best, 2.0 * std::abs(pa - pb) / den);
      }
    }
  }
  return best;
}

std::vector<Point> grid_1d(double lo, double hi, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    Point p(1);
    p[0] = lo + (hi - lo) * i / (count - 1);
    out.push_back(p);
  }
  return out;
}

double gamma_tilde_of(const FunctionData& data, const Vector& Y) {
  const int n = data.size(), d = data.dim();
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      Vector diff = data.site(j) - data.site(k);
      double r2 = diff.squaredNorm();
      Vector yj = Y.segment(j * d, d), yk = Y.segment(k * d, d);
      double at = std::abs(data.value(j) - data.value(k) - yk.dot(diff)) / r2;
      double b = (yj - yk).norm() / std::sqrt(r2);
      best = std::max({best, at, b});
    }
  }
  return best;
}

double gamma1_of(const FunctionData& data, const Vector& Y) {
  const int n = data.size(), d = data.dim();
  double best = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Vector ya = Y.segment(a * d, d), yb = Y.segment(b * d, d);
      Vector ab = data.site(b) - data.site(a);
      double r2 = ab.squaredNorm();
      // P_a(a) - P_b(a) + P_a(b) - P_b(b)
      double pa_a = data.value(a), pb_b = data.value(b);
      double pb_a = data.value(b) - yb.dot(ab), pa_b = data.value(a) + ya.dot(ab);
      double A = std::abs(pa_a - pb_a + pa_b - pb_b) / r2;
      double B = (ya - yb).norm() / std::sqrt(r2);
      best = std::max(best, std::sqrt(A * A + B * B) + A);
    }
  }
  return best;
}

Minimum pattern_search(const std::function<double(const Vector&)>& f, int n, double lo, double hi, int grid,
                       double resolution) {
  Minimum best{std::numeric_limits<double>::infinity(), Vector::Zero(n)};
  std::vector<int> idx(n, 0);
  const double h = (hi - lo) / grid;
  while (true) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = lo + h * idx[i];
    double v = f(x);
    if (v < best.value) best = {v, x};
    int i = 0;
    while (i < n && ++idx[i] > grid) idx[i++] = 0;
    if (i == n) break;
  }
  double step = h;
  while (step >= resolution) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int i = 0; i < n; ++i) {
        for (double s : {step, -step}) {
          Vector x = best.argmin;
          x[i] += s;
          double v = f(x);
          if (v < best.value) {
            best = {v, x};
            moved = true;
          }
        }
      }
    }
    step /= 2.0;
  }
  return best;
}

namespace {

// Calls visit on every k-subset of {0..n-1}, in lexicographic order.
void subsets(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  if (k > n) return;
  while (true) {
    visit(s);
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) return;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

// Normal of the hyperplane through D points in R^D (null vector of the edge matrix).
Vector normal_through(const std::vector<Point>& pts, const std::vector<int>& sel) {
  const int D = static_cast<int>(pts[sel[0]].size());
  Eigen::MatrixXd E(D - 1, D);
  for (int i = 1; i < D; ++i) E.row(i - 1) = (pts[sel[i]] - pts[sel[0]]).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullV);
  return svd.matrixV().col(D - 1);
}

}  // namespace

std::vector<std::vector<int>> hull_facets(const std::vector<Point>& points) {
  const int n = static_cast<int>(points.size());
  const int D = static_cast<int>(points.front().size());
  std::vector<std::vector<int>> out;
  subsets(n, D, [&](const std::vector<int>& sel) {
    Vector nrm = normal_through(points, sel);
    double off = nrm.dot(points[sel[0]]);
    int above = 0, below = 0;
    for (int i = 0; i < n; ++i) {
      if (std::find(sel.begin(), sel.end(), i) != sel.end()) continue;
      double s = nrm.dot(points[i]) - off;
      if (s > 1e-12) ++above;
      if (s < -1e-12) ++below;
    }
    if (above == 0 || below == 0) out.push_back(sel);
  });
  return out;
}

std::vector<std::vector<int>> regular_simplices(const std::vector<Point>& sites, const std::vector<double>& weights) {
  const int n = static_cast<int>(sites.size());
  const int d = static_cast<int>(sites.front().size());
  std::vector<Point> lifted;
  for (int i = 0; i < n; ++i) {
    Point p(d + 1);
    p.head(d) = sites[i];
    p[d] = sites[i].squaredNorm() - weights[i];
    lifted.push_back(p);
  }
  std::vector<std::vector<int>> out;
  subsets(n, d + 1, [&](const std::vector<int>& sel) {
    // Height h(x) = c + g.x through the selected lifted points.
    Eigen::MatrixXd A(d + 1, d + 1);
    Vector rhs(d + 1);
    for (int i = 0; i <= d; ++i) {
      A(i, 0) = 1.0;
      A.row(i).tail(d) = sites[sel[i]].transpose();
      rhs[i] = lifted[sel[i]][d];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() < d + 1) return;
    Vector cg = lu.solve(rhs);
    for (int i = 0; i < n; ++i) {
      if (std::find(sel.begin(), sel.end(), i) != sel.end()) continue;
      double h = cg[0] + cg.tail(d).dot(sites[i]);
      if (!(lifted[i][d] > h + 1e-12)) return;
    }
    out.push_back(sel);
  });
  return out;
}

Point equal_power_point(const std::vector<Point>& sites, const std::vector<double>& weights) {
  // |x - p_i|^2 - w_i = |x - p_0|^2 - w_0  <=>  2 (p_0 - p_i).x = |p_0|^2 - |p_i|^2 + w_i - w_0
  const int d = static_cast<int>(sites.front().size());
  const int m = static_cast<int>(sites.size()) - 1;
  Eigen::MatrixXd A(m, d);
  Vector b(m);
  for (int i = 1; i <= m; ++i) {
    A.row(i - 1) = 2.0 * (sites[0] - sites[i]).transpose();
    b[i - 1] = sites[0].squaredNorm() - sites[i].squaredNorm() + weights[i] - weights[0];
  }
  return (A.transpose() * A).ldlt().solve(A.transpose() * b);
}

Point circumcenter(const std::vector<Point>& simplex) {
  return equal_power_point(simplex, std::vector<double>(simplex.size(), 0.0));
}

double gamma_tilde_min_1d(const FunctionData& data) {
  const int n = data.size(), vars = n + 1;
  // Rows g.z <= h with z = (y_0, ..., y_{n-1}, M).
  std::vector<Vector> G;
  std::vector<double> h;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      double dx = data.site(j)[0] - data.site(k)[0], df = data.value(j) - data.value(k);
      for (double s : {1.0, -1.0}) {
        // s (df - y_k dx) <= M dx^2
        Vector g = Vector::Zero(vars);
        g[k] = -s * dx;
        g[n] = -dx * dx;
        G.push_back(g);
        h.push_back(-s * df);
        // s (y_j - y_k) <= M |dx|
        Vector b = Vector::Zero(vars);
        b[j] = s;
        b[k] = -s;
        b[n] = -std::abs(dx);
        G.push_back(b);
        h.push_back(0.0);
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(G.size());
  subsets(m, vars, [&](const std::vector<int>& rows) {
    Matrix A(vars, vars);
    Vector rhs(vars);
    for (int i = 0; i < vars; ++i) {
      A.row(i) = G[rows[i]].transpose();
      rhs[i] = h[rows[i]];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() < vars) return;
    Vector z = lu.solve(rhs);
    for (int r = 0; r < m; ++r)
      if (G[r].dot(z) > h[r] + 1e-9 * (1.0 + std::abs(h[r]))) return;
    best = std::min(best, z[n]);
  });
  return best;
}

}  // namespace oracle
