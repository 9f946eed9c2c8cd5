#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "whitney/core.hpp"

namespace testing {

using whitney::FunctionData;
using whitney::Jet;
using whitney::OneField;
using whitney::Point;
using whitney::Vector;

inline Point pt(std::initializer_list<double> c) {
  Point p(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double v : c) p[i++] = v;
  return p;
}

// d = 1 field from parallel lists.
inline OneField line_field(std::vector<double> sites, std::vector<double> values, std::vector<double> grads) {
  std::vector<Point> s;
  std::vector<Jet> j;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    s.push_back(pt({sites[k]}));
    j.push_back({values[k], pt({grads[k]})});
  }
  return OneField(1, s, j);
}

inline FunctionData line_data(std::vector<double> sites, std::vector<double> values) {
  std::vector<Point> s;
  for (double v : sites) s.push_back(pt({v}));
  return FunctionData(1, s, values);
}

// The two-point instance used throughout: E = {0, 1}, f = (0, 1), zero gradients.
inline OneField two_point() { return line_field({0.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}); }

// Generic random jets in the unit cube, values and gradients in [-1, 1].
inline OneField random_field(int n, int d, std::uint64_t seed, double side = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
  std::vector<Point> s;
  std::vector<Jet> j;
  for (int k = 0; k < n; ++k) {
    Point p(d), g(d);
    for (int i = 0; i < d; ++i) {
      p[i] = side * u(rng);
      g[i] = v(rng);
    }
    s.push_back(p);
    j.push_back({v(rng), g});
  }
  return OneField(d, s, j);
}

// Jets of the affine function c + g.x at random sites.
inline OneField affine_field(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector g(d);
  for (int i = 0; i < d; ++i) g[i] = u(rng);
  double c = u(rng);
  std::vector<Point> s;
  std::vector<Jet> j;
  for (int k = 0; k < n; ++k) {
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = u(rng);
    s.push_back(p);
    j.push_back({c + g.dot(p), g});
  }
  return OneField(d, s, j);
}

inline std::vector<Point> random_points(int n, int d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) {
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = u(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace testing
