#include "whitney/predicates.hpp"

#include <cmath>
#include <utility>

namespace whitney {

long double orientation(const std::vector<Vector>& points) {
  const int n = static_cast<int>(points.size()) - 1;
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i][j] = static_cast<long double>(points[i + 1][j]) - static_cast<long double>(points[0][j]);
    }
  }
  long double det = 1.0L;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0L) return 0.0L;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < n; ++r) {
      long double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

std::vector<int> select_independent(const std::vector<Vector>& vectors, int max_count, double rel_tol) {
  std::vector<int> kept;
  std::vector<Vector> basis;
  for (std::size_t i = 0; i < vectors.size() && static_cast<int>(kept.size()) < max_count; ++i) {
    Vector r = vectors[i];
    double norm = r.norm();
    if (norm == 0.0) continue;
    // Two passes of Gram-Schmidt keep the basis orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : basis) r -= q.dot(r) * q;
    }
    double res = r.norm();
    if (res > rel_tol * norm) {
      basis.push_back(r / res);
      kept.push_back(static_cast<int>(i));
    }
  }
  return kept;
}

AffineFrame affine_frame(const std::vector<Point>& points, double rel_tol) {
  AffineFrame frame;
  const int dim = static_cast<int>(points.front().size());
  frame.origin = points.front();
  double extent = 0.0;
  for (const Point& p : points) extent = std::max(extent, (p - frame.origin).norm());
  frame.basis.resize(dim, 0);
  if (extent == 0.0) return frame;
  // Greedy farthest-residual selection is stable for nearly flat sets.
  std::vector<Vector> basis;
  for (int r = 0; r < dim; ++r) {
    double best = 0.0;
    Vector best_res;
    for (const Point& p : points) {
      Vector res = p - frame.origin;
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& q : basis) res -= q.dot(res) * q;
      }
      double n = res.norm();
      if (n > best) {
        best = n;
        best_res = res;
      }
    }
    if (best <= rel_tol * extent) break;
    basis.push_back(best_res / best);
  }
  frame.rank = static_cast<int>(basis.size());
  frame.basis.resize(dim, frame.rank);
  for (int c = 0; c < frame.rank; ++c) frame.basis.col(c) = basis[c];
  return frame;
}

Matrix orthonormal_complement(const Matrix& basis, int dim) {
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return Matrix::Identity(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  return q.rightCols(dim - k);
}

Matrix orthonormal_basis(const Matrix& columns) {
  const int k = static_cast<int>(columns.cols());
  const int dim = static_cast<int>(columns.rows());
  if (k == 0) return Matrix(dim, 0);
  Eigen::HouseholderQR<Matrix> qr(columns);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, k);
  return q;
}

double diameter(const std::vector<Point>& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, (points[i] - points[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace whitney
