#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "whitney/core.hpp"

namespace whitney {

struct WeightedSite {
  Point point;
  double weight = 0.0;
};

// (p, |p|^2 - w)
Vector lift(const WeightedSite& site);

// |x - p|^2 - w
double power(const Point& x, const WeightedSite& site);

// Point of equal power to d+1 sites in R^d. Throws DegenerateError(SingularSystem).
Point power_center(const std::vector<WeightedSite>& simplex);

enum class DualKind { PowerCenter, SyntheticRay };

struct DualVertex {
  Point position;
  DualKind kind = DualKind::PowerCenter;
  int origin_face = -1;  // the simplex, or the exterior facet for a ray point
  Vector direction;      // unit ray direction; empty for power centers
};

struct LatticeFace {
  int dim = 0;
  std::vector<int> vertices;       // ascending site indices
  std::vector<int> children;       // faces of dimension dim-1
  std::vector<int> parents;        // faces of dimension dim+1
  std::vector<int> dual_vertices;  // ids into FaceLattice::dual_vertices, ascending
};

struct FaceLattice {
  int dim = 0;
  std::vector<LatticeFace> faces;  // ordered by (dim, vertices)
  std::vector<DualVertex> dual_vertices;

  std::optional<int> find(const std::vector<int>& sorted_vertices) const;
  std::vector<int> faces_of_dim(int j) const;
  // Sites that occur as a vertex of the triangulation.
  std::vector<int> used_sites() const;
  // Re-derives the lookup index after faces are assigned directly.
  void reindex();

 private:
  std::map<std::vector<int>, int> index_;
};

// Faces of the regular triangulation of the weighted sites, with children and parents.
// The sites must span R^d. Throws DegenerateError(DegenerateConfiguration) when a lifted
// lower facet is not a simplex or the lifted points are co-planar.
FaceLattice build_lattice(const std::vector<WeightedSite>& sites);

// Fills in the dual vertex lists: power centers of the simplices, pushed down by union,
// plus one synthetic ray point per exterior facet at distance diameter(sites) from its origin.
FaceLattice build_power_diagram(FaceLattice lattice, const std::vector<WeightedSite>& sites);

// Debug dump as JSON text.
std::string dump_lattice(const FaceLattice& lattice);

}  // namespace whitney
