#pragma once

#include <optional>
#include <vector>

#include "whitney/eval.hpp"
#include "whitney/wells.hpp"

namespace whitney {

// Cell extent as conv(vertices) + cone(rays).
struct CellExtent {
  std::vector<Point> vertices;
  std::vector<Vector> rays;
};

std::vector<CellExtent> cell_extents(const WellsModel& model);

struct LocatorOptions {
  int leaf_size = 6;
  int max_depth = 48;
  int candidates = 32;  // hyperplanes tried per node
};

// Binary tree over bounding hyperplanes of the cells. No balance guarantee.
class LocatorTree {
 public:
  static LocatorTree build(const WellsModel& model, const LocatorOptions& options = {});

  // Lowest-index candidate in the leaf containing x; nullopt if none passes the tolerance test.
  std::optional<int> find(const WellsModel& model, const Point& x) const;
  // find() with the linear scan as fallback.
  int locate(const WellsModel& model, const Point& x) const;
  QueryResult evaluate(const WellsModel& model, const Point& x) const;

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int depth() const;
  int leaf_count() const;

 private:
  struct Node {
    Vector normal;        // left child: normal.x <= offset
    double offset = 0.0;
    int left = -1;
    int right = -1;
    std::vector<int> cells;  // candidates at a leaf, ascending
  };
  std::vector<Node> nodes_;
};

}  // namespace whitney
