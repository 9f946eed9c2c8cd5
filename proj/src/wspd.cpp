#include "whitney/wspd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "parallel.hpp"
#include "whitney/gamma.hpp"

namespace whitney {

double Box::distance(const Box& other) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    double gap = std::max({0.0, other.lo[i] - hi[i], lo[i] - other.hi[i]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

Box bounding_box(const std::vector<Point>& sites, const std::vector<int>& indices) {
  Box box{sites[indices.front()], sites[indices.front()]};
  for (int i : indices) {
    box.lo = box.lo.cwiseMin(sites[i]);
    box.hi = box.hi.cwiseMax(sites[i]);
  }
  return box;
}

std::vector<int> WspdDecomposition::members(const std::vector<int>& node_ids) const {
  std::vector<int> out;
  for (int id : node_ids) {
    const auto& pts = nodes[id].point_indices;
    out.insert(out.end(), pts.begin(), pts.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

void build_tree(const std::vector<Point>& sites, std::vector<SplitTreeNode>& nodes) {
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    SplitTreeNode& node = nodes[id];
    node.bounding_box = bounding_box(sites, node.point_indices);
    node.representative = node.point_indices.front();
    if (node.point_indices.size() == 1) continue;
    Vector side = node.bounding_box.hi - node.bounding_box.lo;
    Eigen::Index axis = 0;
    for (Eigen::Index i = 1; i < side.size(); ++i) {
      if (side[i] > side[axis]) axis = i;
    }
    double mid = 0.5 * (node.bounding_box.lo[axis] + node.bounding_box.hi[axis]);
    SplitTreeNode lo, hi;
    for (int p : node.point_indices) {
      (sites[p][axis] < mid ? lo : hi).point_indices.push_back(p);
    }
    int left = static_cast<int>(nodes.size());
    nodes.push_back(std::move(lo));
    nodes.push_back(std::move(hi));
    nodes[id].left = left;
    nodes[id].right = left + 1;
    stack.push_back(left + 1);
    stack.push_back(left);
  }
}

bool separated(const SplitTreeNode& u, const SplitTreeNode& v, double epsilon) {
  double diam = std::max(u.bounding_box.diameter(), v.bounding_box.diameter());
  return diam < epsilon * u.bounding_box.distance(v.bounding_box);
}

}  // namespace

WspdDecomposition build_wspd(const std::vector<Point>& sites, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError(ValidationCode::BadParameter, "separation epsilon must lie in (0,1)");
  }
  if (sites.empty()) throw ValidationError(ValidationCode::Empty, "no sites");
  if (auto dup = find_duplicate_site(sites)) {
    throw ValidationError(ValidationCode::DuplicateSite, "duplicate sites", dup->first, dup->second);
  }
  WspdDecomposition out;
  out.epsilon = epsilon;
  out.nodes.emplace_back();
  out.nodes[0].point_indices.resize(sites.size());
  std::iota(out.nodes[0].point_indices.begin(), out.nodes[0].point_indices.end(), 0);
  build_tree(sites, out.nodes);

  // Callahan-Kosaraju pairing of the two children of every internal node.
  const auto& nodes = out.nodes;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].is_leaf()) continue;
    std::vector<std::pair<int, int>> work{{nodes[v].left, nodes[v].right}};
    while (!work.empty()) {
      auto [a, b] = work.back();
      work.pop_back();
      if (separated(nodes[a], nodes[b], epsilon)) {
        out.pairs.push_back({{a}, {b}, nodes[a].representative, nodes[b].representative});
        out.pairs.push_back({{b}, {a}, nodes[b].representative, nodes[a].representative});
        continue;
      }
      // Split the node with the larger box; leaves are never split.
      bool split_a = nodes[b].is_leaf() ||
                     (!nodes[a].is_leaf() &&
                      nodes[a].bounding_box.diameter() >= nodes[b].bounding_box.diameter());
      if (split_a) {
        work.emplace_back(nodes[a].right, b);
        work.emplace_back(nodes[a].left, b);
      } else {
        work.emplace_back(a, nodes[b].right);
        work.emplace_back(a, nodes[b].left);
      }
    }
  }
  return out;
}

double wspd_pair_bound(int n, int d, double epsilon) {
  return 2.0 * n * std::pow(10.0 * std::sqrt(static_cast<double>(d)) / epsilon, d);
}

double approx_constant(double epsilon) {
  return 2.0 * (1.0 + std::sqrt(2.0)) * (3.0 + 23.0 * epsilon);
}

namespace {

double tilde_term(const OneField& field, int a, int b) {
  if (a == b) return 0.0;
  return std::max(functional_A_tilde(field, a, b), functional_B(field, a, b));
}

}  // namespace

double gamma1_tilde_restricted(const OneField& field, const WspdDecomposition& wspd) {
  const auto& nodes = wspd.nodes;
  // Families 1 and 2 over the pair list.
  auto pair_best = detail::parallel_argmax(
      static_cast<int>(wspd.pairs.size()), wspd.pairs.size(), [&](int p, detail::ArgMax& acc) {
        const WspdPair& pr = wspd.pairs[p];
        double v = tilde_term(field, pr.rep_left, pr.rep_right);
        for (int s : pr.left) v = std::max(v, tilde_term(field, pr.rep_left, nodes[s].representative));
        for (int s : pr.right) v = std::max(v, tilde_term(field, pr.rep_right, nodes[s].representative));
        acc.offer(v, p, 0);
      });
  // Family 3 over every tree node.
  auto node_best = detail::parallel_argmax(
      static_cast<int>(nodes.size()), nodes.size() * 8, [&](int s, detail::ArgMax& acc) {
        double v = 0.0;
        for (int a : nodes[s].point_indices) v = std::max(v, tilde_term(field, a, nodes[s].representative));
        acc.offer(v, s, 0);
      });
  return std::max({0.0, pair_best.value, node_best.value});
}

GammaApprox gamma1_approx(const OneField& field, double epsilon) {
  require_valid(field);
  WspdDecomposition wspd = build_wspd(field.sites(), epsilon);
  GammaApprox out;
  out.C0 = approx_constant(epsilon);
  out.restricted_tilde = gamma1_tilde_restricted(field, wspd);
  out.M = out.C0 * out.restricted_tilde;
  return out;
}

std::vector<std::pair<int, int>> restricted_pairs(const WspdDecomposition& wspd) {
  std::set<std::pair<int, int>> pairs;
  auto add = [&](int a, int b) {
    if (a != b) pairs.emplace(a, b);
  };
  for (const WspdPair& pr : wspd.pairs) {
    add(pr.rep_left, pr.rep_right);
    for (int s : pr.left) add(pr.rep_left, wspd.nodes[s].representative);
    for (int s : pr.right) add(pr.rep_right, wspd.nodes[s].representative);
  }
  for (const SplitTreeNode& node : wspd.nodes) {
    for (int a : node.point_indices) add(a, node.representative);
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace whitney
