#pragma once

#include <vector>

#include "whitney/core.hpp"

namespace whitney {

// Relative tolerance used by the degeneracy tests.
constexpr double kDegeneracyTolerance = 1e-9;

// det[p1 - p0, ..., pD - p0] for D+1 points in R^D, accumulated in long double.
long double orientation(const std::vector<Vector>& points);

// Affine hull of a point set: origin, orthonormal direction columns, rank.
struct AffineFrame {
  Vector origin;
  Matrix basis;  // dim x rank
  int rank = 0;
};

// Rank is decided with tolerance rel_tol times the point-set extent.
AffineFrame affine_frame(const std::vector<Point>& points, double rel_tol = kDegeneracyTolerance);

// Orthonormal basis (columns) of the complement of span(basis) in R^dim.
Matrix orthonormal_complement(const Matrix& basis, int dim);

// Orthonormal basis of span(vectors); vectors dropped when their residual is below rel_tol * |v|.
// Returns the indices kept, in order.
std::vector<int> select_independent(const std::vector<Vector>& vectors, int max_count,
                                    double rel_tol = kDegeneracyTolerance);

// Orthonormal basis of span of the given columns (QR); the columns must be independent.
Matrix orthonormal_basis(const Matrix& columns);

double diameter(const std::vector<Point>& points);

}  // namespace whitney
