#include "whitney/wells.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "whitney/gamma.hpp"
#include "whitney/predicates.hpp"
#include "whitney/wspd.hpp"

namespace whitney {

double distance_fn(const OneField& field, double M, int a, const Point& x) {
  const Vector& g = field.gradient(a);
  Point shifted = field.site(a) - g / M;
  return field.value(a) - g.squaredNorm() / (2.0 * M) + 0.25 * M * (x - shifted).squaredNorm();
}

std::vector<WeightedSite> shifted_sites(const OneField& field, double M) {
  std::vector<WeightedSite> out;
  for (int k = 0; k < field.size(); ++k) {
    const Vector& g = field.gradient(k);
    out.push_back({field.site(k) - g / M, 2.0 * g.squaredNorm() / (M * M) - 4.0 * field.value(k) / M});
  }
  return out;
}

namespace {

double offset_at(const OneField& field, double M, const std::vector<Point>& shifted,
                 const std::vector<int>& vertices, const Point& x) {
  double best = 0.0;
  bool first = true;
  for (int a : vertices) {
    const Vector& g = field.gradient(a);
    double v = field.value(a) - g.squaredNorm() / (2.0 * M) + 0.25 * M * (x - shifted[a]).squaredNorm();
    if (first || v < best) best = v;
    first = false;
  }
  return best;
}

std::vector<Point> dual_positions(const LatticeFace& face, const FaceLattice& lattice) {
  std::vector<Point> out;
  for (int id : face.dual_vertices) out.push_back(lattice.dual_vertices[id].position);
  return out;
}

// Hyperplane through the given points, as a unit row with the centroid strictly inside.
std::pair<Vector, double> hyperplane_row(const std::vector<Point>& pts, const Point& centroid,
                                         const std::vector<int>& face_vertices) {
  const int k = static_cast<int>(centroid.size());
  Matrix p(static_cast<Eigen::Index>(pts.size()), k);
  for (std::size_t i = 0; i < pts.size(); ++i) p.row(i) = (pts[i] - centroid).transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(p);
  qr.setThreshold(kDegeneracyTolerance);
  if (qr.rank() < k) {
    throw DegenerateError(DegenerateCode::SingularSystem, "build_cell: rank-deficient hyperplane", face_vertices);
  }
  Vector ones = Vector::Ones(p.rows());
  Vector alpha = qr.solve(ones);
  double residual = (p * alpha - ones).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-6)) {
    throw DegenerateError(DegenerateCode::SingularSystem, "build_cell: hyperplane points are not co-planar",
                          face_vertices);
  }
  double bval = 1.0 + alpha.dot(centroid);
  double norm = alpha.norm();
  return {alpha / norm, bval / norm};
}

}  // namespace

Anchor compute_SC(const LatticeFace& face, const std::vector<Point>& shifted, const FaceLattice& lattice,
                  const OneField& field, double M) {
  const int k = lattice.dim;
  const int j = face.dim;
  const Point& base = shifted[face.vertices[0]];
  Anchor out;
  if (j == 0) {
    out.point = base;
  } else if (j == k) {
    out.point = lattice.dual_vertices[face.dual_vertices.front()].position;
  } else {
    std::vector<Point> duals = dual_positions(face, lattice);
    std::vector<Vector> w_all;
    for (std::size_t m = 1; m < duals.size(); ++m) w_all.push_back(duals[m] - duals[0]);
    std::vector<int> keep = select_independent(w_all, k - j);
    if (static_cast<int>(keep.size()) < k - j) {
      throw DegenerateError(DegenerateCode::RankDeficiency, "compute_SC: dual face has too few vertices",
                            face.vertices);
    }
    // base + V gamma = rho_1 + W beta
    Matrix sys(k, k);
    for (int i = 1; i <= j; ++i) sys.col(i - 1) = shifted[face.vertices[i]] - base;
    for (int i = 0; i < k - j; ++i) sys.col(j + i) = -w_all[keep[i]];
    Eigen::FullPivLU<Matrix> lu(sys);
    lu.setThreshold(kDegeneracyTolerance);
    if (!lu.isInvertible()) {
      throw DegenerateError(DegenerateCode::RankDeficiency, "compute_SC: singular anchor system", face.vertices);
    }
    Vector coef = lu.solve(duals[0] - base);
    out.point = base + sys.leftCols(j) * coef.head(j);
  }
  out.offset = offset_at(field, M, shifted, face.vertices, out.point);
  return out;
}

WellsCell build_cell(int face_id, const std::vector<Point>& shifted, const FaceLattice& lattice,
                     const OneField& field, double M) {
  const LatticeFace& face = lattice.faces[face_id];
  const int k = lattice.dim;
  WellsCell cell;
  cell.face = face_id;
  cell.dim = face.dim;
  Anchor anchor = compute_SC(face, shifted, lattice, field, M);
  cell.anchor = anchor.point;
  cell.offset = anchor.offset;

  Matrix edges(k, face.dim);
  for (int i = 1; i <= face.dim; ++i) edges.col(i - 1) = shifted[face.vertices[i]] - shifted[face.vertices[0]];
  cell.basis_H = orthonormal_basis(edges);
  cell.basis_E = orthonormal_complement(cell.basis_H, k);

  std::vector<Point> duals = dual_positions(face, lattice);
  Point mean_s = Point::Zero(k);
  for (int v : face.vertices) mean_s += shifted[v];
  mean_s /= static_cast<double>(face.vertices.size());
  Point mean_d = mean_s;
  if (!duals.empty()) {
    mean_d = Point::Zero(k);
    for (const Point& q : duals) mean_d += q;
    mean_d /= static_cast<double>(duals.size());
  }
  cell.centroid = 0.5 * (mean_s + mean_d);

  std::vector<std::pair<Vector, double>> rows;
  for (int c : face.children) {
    std::vector<Point> pts;
    for (int v : lattice.faces[c].vertices) {
      for (const Point& q : duals) pts.push_back(0.5 * (shifted[v] + q));
    }
    rows.push_back(hyperplane_row(pts, cell.centroid, face.vertices));
  }
  for (int p : face.parents) {
    std::vector<Point> pts;
    for (int v : face.vertices) {
      for (int id : lattice.faces[p].dual_vertices) pts.push_back(0.5 * (shifted[v] + lattice.dual_vertices[id].position));
    }
    rows.push_back(hyperplane_row(pts, cell.centroid, face.vertices));
  }
  cell.A.resize(static_cast<Eigen::Index>(rows.size()), k);
  cell.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    cell.A.row(r) = rows[r].first.transpose();
    cell.b[r] = rows[r].second;
  }
  return cell;
}

namespace {

// Maps a cell from the frame coordinates u = Q^T (x - c) to R^d.
WellsCell embed_cell(const WellsCell& cell, const AffineFrame& frame, const Matrix& complement) {
  WellsCell out = cell;
  out.A = cell.A * frame.basis.transpose();
  out.b = cell.b + out.A * frame.origin;
  out.centroid = frame.origin + frame.basis * cell.centroid;
  out.anchor = frame.origin + frame.basis * cell.anchor;
  out.basis_H = frame.basis * cell.basis_H;
  Matrix e(frame.basis.rows(), cell.basis_E.cols() + complement.cols());
  e << frame.basis * cell.basis_E, complement;
  out.basis_E = e;
  return out;
}

}  // namespace

WellsModel build_model(const OneField& field, double M, BuildStats* stats) {
  require_valid(field);
  if (!(M >= 0.0) || !std::isfinite(M)) {
    throw ValidationError(ValidationCode::BadParameter, "build_model: M must be a non-negative real");
  }
  using clock = std::chrono::steady_clock;
  const int d = field.dim();
  WellsModel model;
  model.field = field;
  model.M = M;
  if (M == 0.0) {
    if (!is_affine(field)) {
      throw ValidationError(ValidationCode::BadParameter, "build_model: M = 0 requires jets of one affine function");
    }
    model.affine = true;
    WellsCell cell;
    cell.dim = 0;
    cell.A.resize(0, d);
    cell.b.resize(0);
    cell.centroid = field.site(0);
    cell.anchor = field.site(0);
    cell.offset = field.value(0);
    cell.basis_H.resize(d, 0);
    cell.basis_E = Matrix::Identity(d, d);
    model.cells.push_back(std::move(cell));
    return model;
  }
  WellsCheck check = wells_condition_check(field, M);
  if (!check.holds) {
    auto [a, b] = *check.violation;
    throw ValidationError(ValidationCode::WellsConditionViolated,
                          "build_model: M violates the Wells condition at pair (" + std::to_string(a) + ", " +
                              std::to_string(b) + ")",
                          a, b);
  }

  auto t0 = clock::now();
  std::vector<WeightedSite> sites = shifted_sites(field, M);
  for (const auto& s : sites) model.shifted.push_back(s.point);
  if (auto dup = find_duplicate_site(model.shifted)) {
    throw DegenerateError(DegenerateCode::DegenerateConfiguration, "build_model: coincident shifted sites",
                          {dup->first, dup->second});
  }
  AffineFrame frame = affine_frame(model.shifted);
  const int k = frame.rank;
  const bool reduced = k < d;
  std::vector<WeightedSite> local = sites;
  std::vector<Point> local_pts = model.shifted;
  if (reduced) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
      local[i].point = frame.basis.transpose() * (sites[i].point - frame.origin);
      local_pts[i] = local[i].point;
    }
  }

  FaceLattice lattice;
  if (k == 0) {
    lattice.dim = 0;
    LatticeFace f;
    f.dim = 0;
    f.vertices = {0};
    lattice.faces.push_back(f);
    lattice.reindex();
  } else {
    lattice = build_power_diagram(build_lattice(local), local);
  }
  auto t1 = clock::now();

  Matrix complement = reduced ? orthonormal_complement(frame.basis, d) : Matrix(d, 0);
  for (std::size_t i = 0; i < lattice.faces.size(); ++i) {
    WellsCell cell = build_cell(static_cast<int>(i), local_pts, lattice, field, M);
    model.cells.push_back(reduced ? embed_cell(cell, frame, complement) : std::move(cell));
  }
  if (reduced) {
    for (DualVertex& v : lattice.dual_vertices) {
      v.position = frame.origin + frame.basis * v.position;
      if (v.direction.size() > 0) v.direction = frame.basis * v.direction;
    }
  }
  model.lattice = std::move(lattice);
  auto t2 = clock::now();

  std::vector<int> used = model.lattice.used_sites();
  for (int s = 0; s < field.size(); ++s) {
    if (!std::binary_search(used.begin(), used.end(), s)) {
      model.warnings.push_back("site " + std::to_string(s) + " has an empty power cell and no piece of its own");
    }
  }
  if (stats) {
    stats->geometry_seconds = std::chrono::duration<double>(t1 - t0).count();
    stats->cells_seconds = std::chrono::duration<double>(t2 - t1).count();
  }
  return model;
}

double select_M(const OneField& field, MSource source, double eps_sep, std::optional<double> user) {
  switch (source) {
    case MSource::Exact:
      return is_affine(field) ? 0.0 : gamma1_exact(field).value;
    case MSource::Approx: {
      if (is_affine(field)) return 0.0;
      double m = gamma1_approx(field, eps_sep).M;
      if (m > 0.0 && !wells_condition_check(field, m).holds) {
        throw ValidationError(ValidationCode::WellsConditionViolated, "approximate M fails the Wells condition");
      }
      return m;
    }
    case MSource::User: {
      if (!user) throw ValidationError(ValidationCode::BadParameter, "user M source without a value");
      double m = *user;
      if (!(m > 0.0)) throw ValidationError(ValidationCode::BadParameter, "user M must be positive");
      WellsCheck check = wells_condition_check(field, m);
      if (!check.holds) {
        throw ValidationError(ValidationCode::WellsConditionViolated, "user M fails the Wells condition",
                              check.violation->first, check.violation->second);
      }
      return m;
    }
  }
  return 0.0;
}

}  // namespace whitney
