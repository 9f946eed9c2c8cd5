#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "whitney/core.hpp"
#include "whitney/optim.hpp"
#include "whitney/wells.hpp"
#include "whitney/wspd.hpp"

namespace whitney {

struct CheckResult {
  std::string name;
  bool passed = true;
  long checked = 0;
  long failures = 0;
  double worst = 0.0;  // largest observed error, or the statistic being checked
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  double interpolation_tol = 1e-10;
  int covering_probes = 1000;
  int c1_samples = 1000;
  double c1_tol = 1e-8;
  long lipschitz_pairs = 100000;
  double lipschitz_slack = 1e-8;
  double lipschitz_attained = 0.9;
  double hessian_tol = 1e-4;
  bool tree = false;
};

// |F(a) - f_a| and |dF(a) - D_a| per component against tol.
CheckResult check_interpolation(const WellsModel& model, double tol = 1e-10);
// Every probe lies in some cell.
CheckResult check_covering(const WellsModel& model, const std::vector<Point>& probes);
// The points (a~ + q)/2 of each cell satisfy its halfspaces.
CheckResult check_cell_vertices(const WellsModel& model);
// basis_H and basis_E are orthonormal and mutually orthogonal.
CheckResult check_orthogonality(const WellsModel& model);
// d_a(S_C) equals the stored offset for every a in S.
CheckResult check_anchors(const WellsModel& model);
// F and dF of a face and of each child agree on the set they share, sampled inside region.
CheckResult check_c1(const WellsModel& model, std::mt19937_64& rng, int samples, double tol, const Box& region);
// Gradient difference ratios stay below M (1 + slack) and their maximum reaches attained * M.
CheckResult check_lipschitz(const WellsModel& model, std::mt19937_64& rng, long pairs, double slack = 1e-8,
                            double attained = 0.9);
// Central differences of dF at each cell centroid give eigenvalues -M (j times) and +M (d-j times).
CheckResult check_hessian(const WellsModel& model, double tol = 1e-4);
// Writing, reading and writing again gives the same text.
CheckResult check_round_trip(const WellsModel& model);
// A stored model matches a fresh build from its own field and M.
CheckResult check_model_text(const std::string& text);
// Tree lookups land in a cell containing the probe, with the scan's value.
CheckResult check_locator(const WellsModel& model, const std::vector<Point>& probes);

// Lemma-style sandwiches, the Wells condition at M = gamma1, and the sampled supremum bound.
CheckResult check_gamma(const OneField& field, const std::vector<Point>& probes, double eps_sep = 0.5);
// Exhaustive coverage, disjointness and separation, plus the tree invariants and the pair bound.
CheckResult check_wspd(const std::vector<Point>& sites, double eps_sep = 0.5);
// Feasibility and the attained restricted maximum at a barrier solution.
CheckResult check_fit(const QcqpProblem& problem, const FunctionFit& fit, double epsilon);

// Max over the given ordered pairs (j, k) of max(A~(j, k), B(j, k)).
double pairwise_tilde(const OneField& field, const std::vector<std::pair<int, int>>& pairs);

// Site bounding box grown by margin times its extent (at least margin) on each side.
Box sample_region(const OneField& field, double margin = 0.25);
// Random points in the site bounding box grown by margin times its extent on each side.
std::vector<Point> sample_box(const OneField& field, std::mt19937_64& rng, int count, double margin = 0.25);

std::vector<CheckResult> run_model_suites(const WellsModel& model, const CheckOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);
std::string format_result(const CheckResult& result);

}  // namespace whitney
