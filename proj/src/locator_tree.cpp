#include "whitney/locator_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace whitney {

std::vector<CellExtent> cell_extents(const WellsModel& model) {
  std::vector<CellExtent> out;
  const int d = model.dim();
  for (const WellsCell& cell : model.cells) {
    CellExtent ext;
    if (model.affine || cell.face < 0) {
      ext.vertices.push_back(cell.anchor);
    } else {
      const LatticeFace& face = model.lattice.faces[cell.face];
      for (int v : face.vertices) {
        if (face.dual_vertices.empty()) ext.vertices.push_back(model.shifted[v]);
        for (int id : face.dual_vertices) {
          const DualVertex& q = model.lattice.dual_vertices[id];
          ext.vertices.push_back(0.5 * (model.shifted[v] + q.position));
        }
      }
      for (int id : face.dual_vertices) {
        const DualVertex& q = model.lattice.dual_vertices[id];
        if (q.kind == DualKind::SyntheticRay) ext.rays.push_back(q.direction);
      }
    }
    if (model.lattice.dim < d || model.affine) {
      // Unbounded in the directions the triangulation does not see.
      for (int i = 0; i < d; ++i) {
        ext.rays.push_back(Vector::Unit(d, i));
        ext.rays.push_back(-Vector::Unit(d, i));
      }
    }
    out.push_back(std::move(ext));
  }
  return out;
}

namespace {

enum class Side { Left, Right, Both };

Side classify(const CellExtent& ext, const Vector& n, double o) {
  const double tol = 1e-9 * (1.0 + std::abs(o));
  double lo = INFINITY, hi = -INFINITY;
  for (const Point& v : ext.vertices) {
    double s = n.dot(v);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  bool ray_left = true, ray_right = true;
  for (const Vector& r : ext.rays) {
    double s = n.dot(r);
    if (s > 1e-12) ray_left = false;
    if (s < -1e-12) ray_right = false;
  }
  if (hi <= o + tol && ray_left) return Side::Left;
  if (lo >= o - tol && ray_right) return Side::Right;
  return Side::Both;
}

}  // namespace

LocatorTree LocatorTree::build(const WellsModel& model, const LocatorOptions& options) {
  LocatorTree tree;
  std::vector<CellExtent> ext = cell_extents(model);
  std::vector<int> all(model.cells.size());
  std::iota(all.begin(), all.end(), 0);
  tree.nodes_.push_back(Node{});
  struct Work {
    int node;
    int depth;
    std::vector<int> cells;
  };
  std::vector<Work> stack;
  stack.push_back({0, 0, std::move(all)});
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    const int count = static_cast<int>(w.cells.size());
    auto make_leaf = [&] { tree.nodes_[w.node].cells = w.cells; };
    if (count <= options.leaf_size || w.depth >= options.max_depth) {
      make_leaf();
      continue;
    }
    std::vector<std::pair<int, int>> rows;
    for (int c : w.cells) {
      for (Eigen::Index r = 0; r < model.cells[c].A.rows(); ++r) rows.emplace_back(c, static_cast<int>(r));
    }
    if (rows.empty()) {
      make_leaf();
      continue;
    }
    const std::size_t step = std::max<std::size_t>(1, rows.size() / options.candidates);
    int best_score = count;
    Vector best_n;
    double best_o = 0.0;
    for (std::size_t i = 0; i < rows.size(); i += step) {
      const WellsCell& cell = model.cells[rows[i].first];
      Vector n = cell.A.row(rows[i].second).transpose();
      double o = cell.b[rows[i].second];
      int left = 0, right = 0, both = 0;
      for (int c : w.cells) {
        switch (classify(ext[c], n, o)) {
          case Side::Left: ++left; break;
          case Side::Right: ++right; break;
          case Side::Both: ++both; break;
        }
      }
      int score = std::max(left + both, right + both);
      if (score < best_score) {
        best_score = score;
        best_n = n;
        best_o = o;
      }
    }
    if (best_score >= count) {
      make_leaf();
      continue;
    }
    std::vector<int> lcells, rcells;
    for (int c : w.cells) {
      Side s = classify(ext[c], best_n, best_o);
      if (s != Side::Right) lcells.push_back(c);
      if (s != Side::Left) rcells.push_back(c);
    }
    int l = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back(Node{});
    tree.nodes_.push_back(Node{});
    tree.nodes_[w.node].normal = best_n;
    tree.nodes_[w.node].offset = best_o;
    tree.nodes_[w.node].left = l;
    tree.nodes_[w.node].right = l + 1;
    stack.push_back({l + 1, w.depth + 1, std::move(rcells)});
    stack.push_back({l, w.depth + 1, std::move(lcells)});
  }
  return tree;
}

std::optional<int> LocatorTree::find(const WellsModel& model, const Point& x) const {
  int n = 0;
  while (nodes_[n].left >= 0) {
    n = nodes_[n].normal.dot(x) <= nodes_[n].offset ? nodes_[n].left : nodes_[n].right;
  }
  for (int c : nodes_[n].cells) {
    if (cell_contains(model.cells[c], x)) return c;
  }
  return std::nullopt;
}

int LocatorTree::locate(const WellsModel& model, const Point& x) const {
  if (auto c = find(model, x)) return *c;
  return whitney::locate(model, x);
}

QueryResult LocatorTree::evaluate(const WellsModel& model, const Point& x) const {
  return evaluate_in_cell(model, locate(model, x), x);
}

int LocatorTree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].left >= 0) {
      depth[nodes_[i].left] = depth[nodes_[i].right] = depth[i] + 1;
      best = std::max(best, depth[i] + 1);
    }
  }
  return best;
}

int LocatorTree::leaf_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.left < 0; }));
}

}  // namespace whitney
