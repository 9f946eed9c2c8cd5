#pragma once

#include <utility>
#include <vector>

#include "whitney/core.hpp"

namespace whitney {

struct Box {
  Vector lo;
  Vector hi;

  double diameter() const { return (hi - lo).norm(); }
  // Euclidean distance between two boxes (0 if they intersect).
  double distance(const Box& other) const;
};

Box bounding_box(const std::vector<Point>& sites, const std::vector<int>& indices);

struct SplitTreeNode {
  Box bounding_box;
  std::vector<int> point_indices;  // ascending
  int left = -1;
  int right = -1;
  int representative = -1;  // smallest index in point_indices

  bool is_leaf() const { return left < 0; }
};

struct WspdPair {
  std::vector<int> left;  // node ids
  std::vector<int> right;
  int rep_left = -1;
  int rep_right = -1;
};

struct WspdDecomposition {
  double epsilon = 0.5;
  std::vector<SplitTreeNode> nodes;  // nodes[0] is the root
  std::vector<WspdPair> pairs;       // ordered: each unordered split appears in both orientations

  const SplitTreeNode& root() const { return nodes.front(); }
  // Union of the point sets of the given nodes, ascending.
  std::vector<int> members(const std::vector<int>& node_ids) const;
};

constexpr double kDefaultSeparation = 0.5;

// Fair-split tree plus pair list. Requires 0 < epsilon < 1 and distinct sites.
WspdDecomposition build_wspd(const std::vector<Point>& sites, double epsilon = kDefaultSeparation);

// 2N (10 sqrt(d) / eps)^d
double wspd_pair_bound(int n, int d, double epsilon);

// 2(1+sqrt 2)(3+23 eps)
double approx_constant(double epsilon);

// Six-family maximum over representatives.
double gamma1_tilde_restricted(const OneField& field, const WspdDecomposition& wspd);

struct GammaApprox {
  double M = 0.0;                 // C0 times the restricted maximum
  double restricted_tilde = 0.0;  // the restricted maximum itself
  double C0 = 0.0;
};

GammaApprox gamma1_approx(const OneField& field, double epsilon = kDefaultSeparation);

// Ordered pairs (j, k), j != k, touched by the six families; deduplicated, sorted.
std::vector<std::pair<int, int>> restricted_pairs(const WspdDecomposition& wspd);

}  // namespace whitney
