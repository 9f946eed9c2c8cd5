#pragma once

#include <vector>

#include "whitney/core.hpp"
#include "whitney/predicates.hpp"

namespace whitney {

// One hull facet: every hull point x satisfies normal.x >= offset (normal is the unit inward normal).
struct HullFacet {
  std::vector<int> vertices;  // ascending
  Vector normal;
  double offset = 0.0;

  double signed_distance(const Vector& x) const { return normal.dot(x) - offset; }
};

// Convex hull of points in R^D by beneath-beyond insertion in furthest-point order.
// Throws DegenerateError(DegenerateInput) when the points do not span R^D.
std::vector<HullFacet> convex_hull(const std::vector<Vector>& points,
                                   double rel_tol = kDegeneracyTolerance);

// Facets visible from -infinity along the last axis. Normals with |last| <= 1e-12 count as vertical.
std::vector<HullFacet> lower_hull(const std::vector<HullFacet>& facets);

}  // namespace whitney
