#pragma once

#include <utility>

#include "whitney/core.hpp"
#include "whitney/wells.hpp"

namespace whitney {

struct QueryResult {
  double value = 0.0;
  Vector gradient;
  int cell_id = -1;
};

constexpr double kLocateTolerance = 1e-9;

// A x <= b + tol (1 + |b|) row-wise.
bool cell_contains(const WellsCell& cell, const Point& x, double tol = kLocateTolerance);

// Lowest-index cell containing x; retries once at 10x tolerance, then throws NoCellFound.
int locate(const WellsModel& model, const Point& x);

// x = (y + z)/2 with y - S_C along S_H and z - S_C along S_E.
std::pair<Point, Point> split_point(const WellsCell& cell, const Point& x);

// The quadratic piece of one cell, evaluated at any x.
QueryResult evaluate_in_cell(const WellsModel& model, int cell_id, const Point& x);

QueryResult evaluate(const WellsModel& model, const Point& x);

}  // namespace whitney
