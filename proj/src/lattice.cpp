#include "whitney/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "whitney/hull.hpp"
#include "whitney/predicates.hpp"

namespace whitney {

Vector lift(const WeightedSite& site) {
  const Eigen::Index d = site.point.size();
  Vector out(d + 1);
  out.head(d) = site.point;
  out[d] = site.point.squaredNorm() - site.weight;
  return out;
}

double power(const Point& x, const WeightedSite& site) { return (x - site.point).squaredNorm() - site.weight; }

Point power_center(const std::vector<WeightedSite>& simplex) {
  if (simplex.empty()) throw ValidationError(ValidationCode::BadParameter, "power_center: empty simplex");
  const int d = static_cast<int>(simplex[0].point.size());
  if (static_cast<int>(simplex.size()) != d + 1) {
    throw ValidationError(ValidationCode::DimensionMismatch, "power_center needs d+1 sites");
  }
  // With rho = p1 + u: 2 (p_i - p1).u = w1 - w_i + |p_i - p1|^2.
  const Point& p1 = simplex[0].point;
  Matrix a(d, d);
  Vector rhs(d);
  for (int i = 1; i <= d; ++i) {
    Vector e = simplex[i].point - p1;
    a.row(i - 1) = 2.0 * e.transpose();
    rhs[i - 1] = simplex[0].weight - simplex[i].weight + e.squaredNorm();
  }
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(kDegeneracyTolerance);
  if (!lu.isInvertible()) {
    throw DegenerateError(DegenerateCode::SingularSystem, "power_center: degenerate simplex");
  }
  Point rho = p1 + lu.solve(rhs);
  double p0 = power(rho, simplex[0]);
  double scale = 1.0;
  for (const auto& s : simplex) scale = std::max({scale, std::abs(power(rho, s) - s.weight) , std::abs(s.weight)});
  for (const auto& s : simplex) {
    if (std::abs(power(rho, s) - p0) > 1e-8 * scale) {
      throw DegenerateError(DegenerateCode::SingularSystem, "power_center: ill-conditioned simplex");
    }
  }
  return rho;
}

std::optional<int> FaceLattice::find(const std::vector<int>& sorted_vertices) const {
  auto it = index_.find(sorted_vertices);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> FaceLattice::faces_of_dim(int j) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (faces[i].dim == j) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> FaceLattice::used_sites() const {
  std::vector<int> out;
  for (const LatticeFace& f : faces) {
    if (f.dim == 0) out.push_back(f.vertices[0]);
  }
  return out;
}

void FaceLattice::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < faces.size(); ++i) index_.emplace(faces[i].vertices, static_cast<int>(i));
}

namespace {

// Sites mapped to a unit-size frame; the triangulation is invariant under this similarity.
struct Normalized {
  std::vector<WeightedSite> sites;
  Vector center;
  double scale = 1.0;
};

Normalized normalize(const std::vector<WeightedSite>& sites) {
  Normalized out;
  const Eigen::Index d = sites[0].point.size();
  out.center = Vector::Zero(d);
  for (const auto& s : sites) out.center += s.point;
  out.center /= static_cast<double>(sites.size());
  double r = 0.0;
  for (const auto& s : sites) r = std::max(r, (s.point - out.center).norm());
  out.scale = r > 0.0 ? r : 1.0;
  for (const auto& s : sites) {
    out.sites.push_back({(s.point - out.center) / out.scale, s.weight / (out.scale * out.scale)});
  }
  return out;
}

std::vector<std::vector<int>> lower_simplices(const Normalized& norm) {
  const int n = static_cast<int>(norm.sites.size());
  const int d = static_cast<int>(norm.sites[0].point.size());
  if (n == d + 1) {
    std::vector<Vector> pts;
    for (const auto& s : norm.sites) pts.push_back(s.point);
    long double vol = orientation(pts);
    if (std::fabs(static_cast<double>(vol)) <= kDegeneracyTolerance) {
      std::vector<int> all(n);
      for (int i = 0; i < n; ++i) all[i] = i;
      throw DegenerateError(DegenerateCode::DegenerateConfiguration, "build_lattice: degenerate simplex", all);
    }
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return {all};
  }
  // Heights are rescaled so the tolerance is relative in every coordinate.
  std::vector<Vector> lifted;
  double hmean = 0.0;
  for (const auto& s : norm.sites) {
    lifted.push_back(lift(s));
    hmean += lifted.back()[d];
  }
  hmean /= n;
  double hspread = 0.0;
  for (const auto& p : lifted) hspread = std::max(hspread, std::abs(p[d] - hmean));
  if (hspread == 0.0) hspread = 1.0;
  for (auto& p : lifted) p[d] = (p[d] - hmean) / hspread;

  std::vector<HullFacet> hull;
  try {
    hull = convex_hull(lifted);
  } catch (const DegenerateError&) {
    throw DegenerateError(DegenerateCode::DegenerateConfiguration,
                          "build_lattice: lifted sites are co-planar (co-power configuration)");
  }
  std::vector<std::vector<int>> simplices;
  for (const HullFacet& f : lower_hull(hull)) {
    if (f.normal[d] <= kDegeneracyTolerance) {
      throw DegenerateError(DegenerateCode::DegenerateConfiguration,
                            "build_lattice: nearly vertical lower facet", f.vertices);
    }
    for (int i = 0; i < n; ++i) {
      if (std::binary_search(f.vertices.begin(), f.vertices.end(), i)) continue;
      if (f.signed_distance(lifted[i]) <= kDegeneracyTolerance) {
        std::vector<int> bad = f.vertices;
        bad.push_back(i);
        std::sort(bad.begin(), bad.end());
        throw DegenerateError(DegenerateCode::DegenerateConfiguration,
                              "build_lattice: lower facet is not a simplex (co-spherical or co-power sites)", bad);
      }
    }
    simplices.push_back(f.vertices);
  }
  std::sort(simplices.begin(), simplices.end());
  return simplices;
}

}  // namespace

FaceLattice build_lattice(const std::vector<WeightedSite>& sites) {
  if (sites.empty()) throw ValidationError(ValidationCode::Empty, "build_lattice: no sites");
  const int d = static_cast<int>(sites[0].point.size());
  std::vector<Point> pts;
  for (const auto& s : sites) {
    if (s.point.size() != d) throw ValidationError(ValidationCode::DimensionMismatch, "build_lattice: ragged sites");
    if (!s.point.allFinite() || !std::isfinite(s.weight)) {
      throw ValidationError(ValidationCode::NonFiniteEntry, "build_lattice: non-finite site");
    }
    pts.push_back(s.point);
  }
  if (auto dup = find_duplicate_site(pts)) {
    throw DegenerateError(DegenerateCode::DegenerateConfiguration, "build_lattice: coincident sites",
                          {dup->first, dup->second});
  }
  if (static_cast<int>(sites.size()) < d + 1 || affine_frame(pts).rank < d) {
    throw DegenerateError(DegenerateCode::DegenerateInput, "build_lattice: sites do not span R^d");
  }
  Normalized norm = normalize(sites);
  std::vector<std::vector<int>> simplices = lower_simplices(norm);

  std::map<std::vector<int>, int> ids;
  for (const auto& simplex : simplices) {
    const unsigned count = 1u << simplex.size();
    for (unsigned mask = 1; mask < count; ++mask) {
      std::vector<int> sub;
      for (std::size_t b = 0; b < simplex.size(); ++b) {
        if (mask & (1u << b)) sub.push_back(simplex[b]);
      }
      ids.emplace(std::move(sub), 0);
    }
  }
  // Order by dimension, then lexicographically.
  std::vector<std::vector<int>> keys;
  for (auto& [k, v] : ids) keys.push_back(k);
  std::stable_sort(keys.begin(), keys.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  FaceLattice lattice;
  lattice.dim = d;
  for (auto& k : keys) {
    LatticeFace f;
    f.dim = static_cast<int>(k.size()) - 1;
    f.vertices = k;
    lattice.faces.push_back(std::move(f));
  }
  lattice.reindex();
  for (std::size_t i = 0; i < lattice.faces.size(); ++i) {
    LatticeFace& f = lattice.faces[i];
    if (f.dim == 0) continue;
    for (std::size_t drop = 0; drop < f.vertices.size(); ++drop) {
      std::vector<int> sub;
      for (std::size_t t = 0; t < f.vertices.size(); ++t) {
        if (t != drop) sub.push_back(f.vertices[t]);
      }
      int c = *lattice.find(sub);
      f.children.push_back(c);
      lattice.faces[c].parents.push_back(static_cast<int>(i));
    }
  }
  for (auto& f : lattice.faces) std::sort(f.parents.begin(), f.parents.end());
  return lattice;
}

FaceLattice build_power_diagram(FaceLattice lattice, const std::vector<WeightedSite>& sites) {
  const int d = lattice.dim;
  Normalized norm = normalize(sites);
  std::vector<Point> pts;
  for (const auto& s : sites) pts.push_back(s.point);
  const double reach = diameter(pts);
  lattice.dual_vertices.clear();
  for (auto& f : lattice.faces) f.dual_vertices.clear();

  for (std::size_t i = 0; i < lattice.faces.size(); ++i) {
    LatticeFace& f = lattice.faces[i];
    if (f.dim != d) continue;
    std::vector<WeightedSite> simplex;
    for (int v : f.vertices) simplex.push_back(norm.sites[v]);
    Point rho;
    try {
      rho = norm.center + norm.scale * power_center(simplex);
    } catch (const DegenerateError& e) {
      throw DegenerateError(DegenerateCode::DegenerateConfiguration, e.what(), f.vertices);
    }
    f.dual_vertices.push_back(static_cast<int>(lattice.dual_vertices.size()));
    lattice.dual_vertices.push_back({rho, DualKind::PowerCenter, static_cast<int>(i), Vector()});
  }
  for (std::size_t i = 0; i < lattice.faces.size(); ++i) {
    LatticeFace& f = lattice.faces[i];
    if (f.dim != d - 1 || f.parents.size() != 1) continue;
    const LatticeFace& parent = lattice.faces[f.parents[0]];
    int opposite = -1;
    for (int v : parent.vertices) {
      if (!std::binary_search(f.vertices.begin(), f.vertices.end(), v)) opposite = v;
    }
    const Point& base = sites[f.vertices[0]].point;
    Matrix span(d, d - 1);
    for (int t = 1; t < d; ++t) span.col(t - 1) = sites[f.vertices[t]].point - base;
    Vector u = base - sites[opposite].point;
    if (d > 1) {
      Matrix q = orthonormal_basis(span);
      u -= q * (q.transpose() * u);
    }
    u.normalize();
    const DualVertex& origin = lattice.dual_vertices[parent.dual_vertices[0]];
    Point ray = origin.position + reach * u;
    f.dual_vertices.push_back(static_cast<int>(lattice.dual_vertices.size()));
    lattice.dual_vertices.push_back({ray, DualKind::SyntheticRay, static_cast<int>(i), u});
  }
  // Faces are ordered by dimension, so parents are complete before their children.
  for (std::size_t r = lattice.faces.size(); r-- > 0;) {
    LatticeFace& f = lattice.faces[r];
    for (int p : f.parents) {
      const auto& pd = lattice.faces[p].dual_vertices;
      f.dual_vertices.insert(f.dual_vertices.end(), pd.begin(), pd.end());
    }
    std::sort(f.dual_vertices.begin(), f.dual_vertices.end());
    f.dual_vertices.erase(std::unique(f.dual_vertices.begin(), f.dual_vertices.end()), f.dual_vertices.end());
  }
  return lattice;
}

std::string dump_lattice(const FaceLattice& lattice) {
  nlohmann::ordered_json doc;
  doc["dim"] = lattice.dim;
  auto& faces = doc["faces"] = nlohmann::ordered_json::array();
  for (const LatticeFace& f : lattice.faces) {
    nlohmann::ordered_json jf;
    jf["dim"] = f.dim;
    jf["vertices"] = f.vertices;
    jf["children"] = f.children;
    jf["parents"] = f.parents;
    jf["dual"] = f.dual_vertices;
    faces.push_back(std::move(jf));
  }
  auto& duals = doc["dual_vertices"] = nlohmann::ordered_json::array();
  for (const DualVertex& v : lattice.dual_vertices) {
    nlohmann::ordered_json jv;
    jv["kind"] = v.kind == DualKind::PowerCenter ? "power_center" : "synthetic_ray";
    jv["origin_face"] = v.origin_face;
    jv["position"] = std::vector<double>(v.position.data(), v.position.data() + v.position.size());
    duals.push_back(std::move(jv));
  }
  return doc.dump(2);
}

}  // namespace whitney
