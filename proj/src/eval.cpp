#include "whitney/eval.hpp"

#include <cmath>
#include <sstream>

namespace whitney {

bool cell_contains(const WellsCell& cell, const Point& x, double tol) {
  for (Eigen::Index r = 0; r < cell.A.rows(); ++r) {
    double b = cell.b[r];
    if (cell.A.row(r).dot(x) > b + tol * (1.0 + std::abs(b))) return false;
  }
  return true;
}

int locate(const WellsModel& model, const Point& x) {
  if (x.size() != model.dim()) throw ValidationError(ValidationCode::DimensionMismatch, "locate: wrong dimension");
  for (double tol : {kLocateTolerance, 10.0 * kLocateTolerance}) {
    for (std::size_t c = 0; c < model.cells.size(); ++c) {
      if (cell_contains(model.cells[c], x, tol)) return static_cast<int>(c);
    }
  }
  std::ostringstream os;
  os << "no cell contains the query point (" << x.transpose() << ")";
  throw NoCellFound(os.str());
}

std::pair<Point, Point> split_point(const WellsCell& cell, const Point& x) {
  Vector v = x - cell.anchor;
  Point y = cell.anchor + 2.0 * (cell.basis_H * (cell.basis_H.transpose() * v));
  Point z = cell.anchor + 2.0 * (cell.basis_E * (cell.basis_E.transpose() * v));
  return {y, z};
}

QueryResult evaluate_in_cell(const WellsModel& model, int cell_id, const Point& x) {
  QueryResult out;
  out.cell_id = cell_id;
  if (model.affine) {
    out.value = jet_eval(model.field.jet(0), model.field.site(0), x);
    out.gradient = model.field.gradient(0);
    return out;
  }
  const WellsCell& cell = model.cells[cell_id];
  const double M = model.M;
  // With v = x - S_C: z - S_C = 2 P_E v and y - S_C = 2 P_H v.
  Vector v;
  if (cell.dim == 0 && cell.face >= 0) {
    // S_C is the shifted site a - D/M; going through a keeps digits that the rounded shift loses.
    const int a = model.lattice.faces[cell.face].vertices.front();
    v = (x - model.field.site(a)) + model.field.gradient(a) / M;
  } else {
    v = x - cell.anchor;
  }
  Vector ve = cell.basis_E * (cell.basis_E.transpose() * v);
  Vector vh = cell.basis_H * (cell.basis_H.transpose() * v);
  out.value = cell.offset + (M / 2.0) * ve.squaredNorm() - (M / 2.0) * vh.squaredNorm();
  out.gradient = M * (ve - vh);
  return out;
}

QueryResult evaluate(const WellsModel& model, const Point& x) {
  return evaluate_in_cell(model, locate(model, x), x);
}

}  // namespace whitney
