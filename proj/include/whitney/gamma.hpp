#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "whitney/core.hpp"

namespace whitney {

struct GammaBreakdown {
  double value = 0.0;
  std::pair<int, int> argmax_pair{-1, -1};  // (-1,-1) when N = 1
  double A_at_max = 0.0;
  double B_at_max = 0.0;
};

// |P_a(a) - P_b(a) + P_a(b) - P_b(b)| / |a-b|^2 for a = site j, b = site k.
double functional_A(const OneField& field, int j, int k);
// |D_a - D_b| / |a-b|
double functional_B(const OneField& field, int j, int k);
// |P_a(a) - P_b(a)| / |a-b|^2; not symmetric in (j, k).
double functional_A_tilde(const OneField& field, int j, int k);

// sqrt(A^2 + B^2) + A
inline double combine_AB(double A, double B) { return std::hypot(A, B) + A; }

// Max over pairs j < k of sqrt(A^2 + B^2) + A. Ties resolve to the lexicographically smallest pair.
GammaBreakdown gamma1_exact(const OneField& field);

// 2 max_x max_{a != b} |P_a(x) - P_b(x)| / (|a-x|^2 + |b-x|^2) over the given probes.
double gamma1_sup_sample(const OneField& field, const std::vector<Point>& probes);

// Max over pairs of max(A~(a,b), A~(b,a), B).
double gamma1_tilde(const OneField& field);

struct WellsCheck {
  bool holds = true;
  std::optional<std::pair<int, int>> violation;  // ordered pair (a, b) that fails
};

// f_b <= f_a + (D_a+D_b).(b-a)/2 + M|b-a|^2/4 - |D_a-D_b|^2/(4M) for all ordered pairs.
WellsCheck wells_condition_check(const OneField& field, double M);

}  // namespace whitney
