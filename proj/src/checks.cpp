#include "whitney/checks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "whitney/eval.hpp"
#include "whitney/gamma.hpp"
#include "whitney/locator_tree.hpp"
#include "whitney/model_io.hpp"
#include "whitney/predicates.hpp"
#include "whitney/wspd.hpp"

namespace whitney {

namespace {

CheckResult named(std::string name) {
  CheckResult r;
  r.name = std::move(name);
  return r;
}

void record(CheckResult& r, bool ok, double err) {
  ++r.checked;
  if (!ok) ++r.failures;
  r.worst = std::max(r.worst, err);
}

CheckResult finish(CheckResult r) {
  r.passed = r.failures == 0;
  return r;
}

// Weights uniform on the simplex.
std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& v : w) s += (v = ex(rng));
  for (auto& v : w) v /= s;
  return w;
}

Point combine(const std::vector<Point>& pts, const std::vector<double>& w) {
  Point out = Point::Zero(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) out += w[i] * pts[i];
  return out;
}

double site_scale(const OneField& field) {
  double s = 0.0;
  for (const Point& p : field.sites()) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

CheckResult check_interpolation(const WellsModel& model, double tol) {
  CheckResult r = named("interpolation");
  const OneField& f = model.field;
  for (int a = 0; a < f.size(); ++a) {
    QueryResult q = evaluate(model, f.site(a));
    double e = std::abs(q.value - f.value(a));
    record(r, e <= tol, e);
    for (int i = 0; i < f.dim(); ++i) {
      double g = std::abs(q.gradient[i] - f.gradient(a)[i]);
      record(r, g <= tol, g);
    }
  }
  return finish(r);
}

CheckResult check_covering(const WellsModel& model, const std::vector<Point>& probes) {
  CheckResult r = named("covering");
  for (const Point& x : probes) {
    bool ok = true;
    try {
      locate(model, x);
    } catch (const NoCellFound&) {
      ok = false;
    }
    record(r, ok, 0.0);
  }
  return finish(r);
}

CheckResult check_cell_vertices(const WellsModel& model) {
  CheckResult r = named("cell vertices");
  if (model.affine) return finish(r);
  for (std::size_t c = 0; c < model.cells.size(); ++c) {
    const WellsCell& cell = model.cells[c];
    const LatticeFace& face = model.lattice.faces[cell.face];
    for (int v : face.vertices) {
      for (int id : face.dual_vertices) {
        Point x = 0.5 * (model.shifted[v] + model.lattice.dual_vertices[id].position);
        double excess = cell.A.rows() ? (cell.A * x - cell.b).maxCoeff() : 0.0;
        double scale = 1.0 + (cell.b.size() ? cell.b.cwiseAbs().maxCoeff() : 0.0);
        record(r, excess <= 1e-9 * scale, std::max(0.0, excess));
      }
    }
  }
  return finish(r);
}

CheckResult check_orthogonality(const WellsModel& model) {
  CheckResult r = named("orthogonality");
  const int d = model.dim();
  for (const WellsCell& cell : model.cells) {
    Matrix B(d, cell.basis_H.cols() + cell.basis_E.cols());
    B << cell.basis_H, cell.basis_E;
    double e = B.cols() == d ? (B.transpose() * B - Matrix::Identity(d, d)).cwiseAbs().maxCoeff()
                             : std::numeric_limits<double>::infinity();
    record(r, e <= 1e-10 && cell.basis_H.cols() == cell.dim, e);
  }
  return finish(r);
}

CheckResult check_anchors(const WellsModel& model) {
  CheckResult r = named("anchor consistency");
  if (model.affine) return finish(r);
  for (const WellsCell& cell : model.cells) {
    const LatticeFace& face = model.lattice.faces[cell.face];
    for (int a : face.vertices) {
      double v = distance_fn(model.field, model.M, a, cell.anchor);
      double e = std::abs(v - cell.offset);
      record(r, e <= 1e-8 * (1.0 + std::abs(cell.offset)), e / (1.0 + std::abs(cell.offset)));
    }
  }
  return finish(r);
}

CheckResult check_c1(const WellsModel& model, std::mt19937_64& rng, int samples, double tol, const Box& region) {
  CheckResult r = named("C1 continuity");
  if (model.affine) return finish(r);
  std::vector<std::pair<int, int>> links;  // (face, child)
  for (std::size_t s = 0; s < model.lattice.faces.size(); ++s) {
    for (int c : model.lattice.faces[s].children) links.emplace_back(static_cast<int>(s), c);
  }
  if (links.empty()) return finish(r);
  const long per_link = std::max<long>(1, (samples + static_cast<long>(links.size()) - 1) / static_cast<long>(links.size()));
  std::vector<long> kept(links.size(), 0);
  long total = 0;
  // Facets that leave the region give their quota to later rounds over the others.
  for (int round = 0; round < 64 && total < samples; ++round) {
    long added = 0;
    for (std::size_t l = 0; l < links.size() && total < samples; ++l) {
      if (round > 0 && kept[l] == 0) continue;
      auto [s, c] = links[l];
      const LatticeFace& face = model.lattice.faces[s];
      const LatticeFace& child = model.lattice.faces[c];
      std::vector<Point> ys, zs;
      for (int v : child.vertices) ys.push_back(model.shifted[v]);
      for (int id : face.dual_vertices) zs.push_back(model.lattice.dual_vertices[id].position);
      if (zs.empty()) continue;
      long got = 0;
      for (long t = 0; t < 50 * per_link && got < per_link; ++t) {
        Point x = 0.5 * (combine(ys, dirichlet(rng, ys.size())) + combine(zs, dirichlet(rng, zs.size())));
        if ((x - region.lo).minCoeff() < 0.0 || (region.hi - x).minCoeff() < 0.0) continue;
        ++got;
        QueryResult p = evaluate_in_cell(model, s, x);
        QueryResult q = evaluate_in_cell(model, c, x);
        double e = std::max(std::abs(p.value - q.value), (p.gradient - q.gradient).cwiseAbs().maxCoeff());
        record(r, e < tol, e);
      }
      kept[l] += got;
      added += got;
    }
    total += added;
    if (added == 0) break;
  }
  long outside_links = std::count(kept.begin(), kept.end(), 0L);
  r.detail = std::to_string(links.size() - outside_links) + " of " + std::to_string(links.size()) +
             " shared facets sampled in the region";
  return finish(r);
}

CheckResult check_lipschitz(const WellsModel& model, std::mt19937_64& rng, long pairs, double slack,
                            double attained) {
  CheckResult r = named("Lipschitz gradient");
  const OneField& f = model.field;
  const int d = f.dim();
  const double M = model.M;
  double extent = 0.0;
  Vector lo = f.site(0), hi = f.site(0);
  for (const Point& p : f.sites()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  extent = std::max((hi - lo).maxCoeff(), 1.0);
  auto pair = gamma1_exact(f).argmax_pair;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto direction = [&] {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    return Vector(v / v.norm());
  };
  double best = 0.0;
  for (long t = 0; t < pairs; ++t) {
    Point x;
    double radius;
    if (pair.first >= 0 && t % 2 == 0) {
      // Near the segment between the argmax sites, with short separations.
      const Point& a = f.site(pair.first);
      const Point& b = f.site(pair.second);
      double len = (b - a).norm();
      x = a + u01(rng) * (b - a) + 0.05 * len * u01(rng) * direction();
      radius = len * std::pow(10.0, -3.0 + 2.0 * u01(rng));
    } else {
      x = sample_box(f, rng, 1, 0.25).front();
      radius = extent * std::pow(10.0, -3.0 + 3.0 * u01(rng));
    }
    Point y = x + radius * direction();
    QueryResult gx = evaluate(model, x);
    QueryResult gy = evaluate(model, y);
    double ratio = (gx.gradient - gy.gradient).norm() / (x - y).norm();
    best = std::max(best, ratio);
    ++r.checked;
    if (ratio > M * (1.0 + slack)) ++r.failures;
  }
  r.worst = best;
  std::ostringstream os;
  os << std::setprecision(12) << "max ratio " << best << ", M " << M;
  if (best < attained * M) {
    ++r.failures;
    os << ", below " << attained << " M";
  }
  r.detail = os.str();
  return finish(r);
}

CheckResult check_hessian(const WellsModel& model, double tol) {
  CheckResult r = named("cell Hessian");
  const int d = model.dim();
  const double M = model.M;
  const double scale = 1.0 + site_scale(model.field);
  long skipped = 0;
  for (std::size_t c = 0; c < model.cells.size(); ++c) {
    const WellsCell& cell = model.cells[c];
    const Point& x = cell.centroid;
    double room = cell.A.rows() ? (cell.b - cell.A * x).minCoeff() : scale;
    if (!(room > 0.0)) {
      record(r, false, std::numeric_limits<double>::infinity());
      continue;
    }
    const double h = std::min(0.25 * room, 1e-2 * scale);
    // Probes must stay in this cell for the difference quotient to see its quadratic.
    bool inside = true;
    Matrix H(d, d);
    for (int i = 0; i < d; ++i) {
      Vector e = Vector::Unit(d, i) * h;
      QueryResult p = evaluate(model, x + e);
      QueryResult m = evaluate(model, x - e);
      if (p.cell_id != static_cast<int>(c) || m.cell_id != static_cast<int>(c)) inside = false;
      H.col(i) = (p.gradient - m.gradient) / (2.0 * h);
    }
    if (!inside) {
      ++skipped;
      continue;
    }
    Matrix S = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    Vector expect(d);
    for (int i = 0; i < d; ++i) expect[i] = i < cell.dim ? -M : M;
    double e = (es.eigenvalues() - expect).cwiseAbs().maxCoeff();
    double rel = M > 0.0 ? e / M : e;
    record(r, M > 0.0 ? rel <= tol : e <= 1e-12, rel);
  }
  if (skipped) r.detail = std::to_string(skipped) + " cells whose probes located elsewhere";
  return finish(r);
}

CheckResult check_round_trip(const WellsModel& model) {
  CheckResult r = named("model round trip");
  std::string first = model_to_json(model);
  std::string second;
  try {
    second = model_to_json(model_from_json(first));
  } catch (const Error& e) {
    r.detail = e.what();
  }
  record(r, !second.empty() && first == second, 0.0);
  return finish(r);
}

CheckResult check_model_text(const std::string& text) {
  CheckResult r = named("model file consistency");
  bool ok = false;
  try {
    WellsModel loaded = model_from_json(text);
    WellsModel rebuilt = build_model(loaded.field, loaded.M);
    ok = model_to_json(loaded) == model_to_json(rebuilt);
    if (!ok) r.detail = "stored model differs from a rebuild of its field";
  } catch (const Error& e) {
    r.detail = e.what();
  }
  record(r, ok, 0.0);
  return finish(r);
}

CheckResult check_locator(const WellsModel& model, const std::vector<Point>& probes) {
  CheckResult r = named("locator tree");
  LocatorTree tree = LocatorTree::build(model);
  for (const Point& x : probes) {
    int id = tree.locate(model, x);
    QueryResult a = evaluate_in_cell(model, id, x);
    QueryResult b = evaluate(model, x);
    double e = std::max(std::abs(a.value - b.value), (a.gradient - b.gradient).cwiseAbs().maxCoeff());
    bool ok = cell_contains(model.cells[id], x, 10.0 * kLocateTolerance) && e < 1e-8;
    record(r, ok, e);
  }
  return finish(r);
}

CheckResult check_gamma(const OneField& field, const std::vector<Point>& probes, double eps_sep) {
  CheckResult r = named("gamma bounds");
  const double g = gamma1_exact(field).value;
  const double tilde = gamma1_tilde(field);
  const double c = 2.0 * (1.0 + std::sqrt(2.0));
  const double rel = 1e-9 * std::max(1.0, g);
  record(r, tilde <= g + rel, std::max(0.0, tilde - g));
  record(r, g <= c * tilde + rel, std::max(0.0, g - c * tilde));
  GammaApprox approx = gamma1_approx(field, eps_sep);
  record(r, g <= approx.M + rel, std::max(0.0, g - approx.M));
  record(r, approx.M <= approx.C0 * g + rel, std::max(0.0, approx.M - approx.C0 * g));
  if (g > 0.0) record(r, wells_condition_check(field, g).holds, 0.0);
  if (!probes.empty()) {
    double s = gamma1_sup_sample(field, probes);
    record(r, s <= g + 1e-9, std::max(0.0, s - g));
  }
  std::ostringstream os;
  os << std::setprecision(12) << "gamma1 " << g << ", tilde " << tilde << ", approx " << approx.M;
  r.detail = os.str();
  return finish(r);
}

CheckResult check_wspd(const std::vector<Point>& sites, double eps_sep) {
  CheckResult r = named("WSPD structure");
  const int n = static_cast<int>(sites.size());
  WspdDecomposition w = build_wspd(sites, eps_sep);
  for (const SplitTreeNode& node : w.nodes) {
    bool leaf_ok = node.is_leaf() == (node.point_indices.size() == 1);
    bool rep_ok = std::binary_search(node.point_indices.begin(), node.point_indices.end(), node.representative);
    bool part_ok = true;
    if (!node.is_leaf()) {
      std::vector<int> u = w.members({node.left, node.right});
      part_ok = u == node.point_indices && w.nodes[node.left].point_indices.size() +
                                                   w.nodes[node.right].point_indices.size() ==
                                               node.point_indices.size();
    }
    record(r, leaf_ok && rep_ok && part_ok, 0.0);
  }
  std::vector<int> count(static_cast<std::size_t>(n) * n, 0);
  for (const WspdPair& p : w.pairs) {
    std::vector<int> L = w.members(p.left);
    std::vector<int> R = w.members(p.right);
    double dist = std::numeric_limits<double>::infinity();
    for (int i : L) {
      for (int j : R) {
        ++count[static_cast<std::size_t>(i) * n + j];
        dist = std::min(dist, (sites[i] - sites[j]).norm());
      }
    }
    auto diam = [&](const std::vector<int>& s) {
      double m = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) m = std::max(m, (sites[s[a]] - sites[s[b]]).norm());
      }
      return m;
    };
    bool reps = std::binary_search(L.begin(), L.end(), p.rep_left) && std::binary_search(R.begin(), R.end(), p.rep_right);
    record(r, std::max(diam(L), diam(R)) < eps_sep * dist && reps, 0.0);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int c = count[static_cast<std::size_t>(i) * n + j];
      record(r, i == j ? c == 0 : c == 1, 0.0);
    }
  }
  const int d = n ? static_cast<int>(sites.front().size()) : 0;
  if (eps_sep <= 0.5 && n > 0) {
    record(r, static_cast<double>(w.pairs.size()) <= wspd_pair_bound(n, d, eps_sep), 0.0);
  }
  r.detail = std::to_string(w.pairs.size()) + " pairs";
  return finish(r);
}

double pairwise_tilde(const OneField& field, const std::vector<std::pair<int, int>>& pairs) {
  double m = 0.0;
  for (auto [j, k] : pairs) m = std::max({m, functional_A_tilde(field, j, k), functional_B(field, j, k)});
  return m;
}

CheckResult check_fit(const QcqpProblem& problem, const FunctionFit& fit, double epsilon) {
  CheckResult r = named("fit optimality");
  const int d = problem.dim();
  Vector Y(d * problem.data.size());
  for (int k = 0; k < problem.data.size(); ++k) {
    Y.segment(k * d, d) = fit.field.gradient(k);
    record(r, fit.field.value(k) == problem.data.value(k), 0.0);
  }
  if (!problem.pairs.empty()) {
    double worst = constraint_values(problem, Y, fit.M_tilde).maxCoeff();
    record(r, worst <= 0.0, std::max(0.0, worst));
    double attained = pairwise_tilde(fit.field, problem.pairs);
    double gap = std::abs(attained - fit.M_tilde);
    record(r, gap <= 1e-6 + epsilon, gap);
  }
  std::ostringstream os;
  os << std::setprecision(12) << "M~ " << fit.M_tilde << ", newton steps " << fit.report.newton_steps
     << ", bound " << fit.report.step_bound;
  r.detail = os.str();
  return finish(r);
}

Box sample_region(const OneField& field, double margin) {
  const int d = field.dim();
  Vector lo = field.site(0), hi = field.site(0);
  for (const Point& p : field.sites()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Vector pad = (margin * (hi - lo)).cwiseMax(Vector::Constant(d, margin));
  return {lo - pad, hi + pad};
}

std::vector<Point> sample_box(const OneField& field, std::mt19937_64& rng, int count, double margin) {
  const int d = field.dim();
  Box box = sample_region(field, margin);
  std::vector<Point> out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < count; ++t) {
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = box.lo[i] + u(rng) * (box.hi[i] - box.lo[i]);
    out.push_back(x);
  }
  return out;
}

std::vector<CheckResult> run_model_suites(const WellsModel& model, const CheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<CheckResult> out;
  std::vector<Point> probes = sample_box(model.field, rng, options.covering_probes);
  out.push_back(check_interpolation(model, options.interpolation_tol));
  out.push_back(check_covering(model, probes));
  out.push_back(check_cell_vertices(model));
  out.push_back(check_orthogonality(model));
  out.push_back(check_anchors(model));
  out.push_back(check_c1(model, rng, options.c1_samples, options.c1_tol, sample_region(model.field)));
  out.push_back(check_lipschitz(model, rng, options.lipschitz_pairs, options.lipschitz_slack,
                                options.lipschitz_attained));
  out.push_back(check_hessian(model, options.hessian_tol));
  out.push_back(check_round_trip(model));
  if (options.tree) out.push_back(check_locator(model, probes));
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

std::string format_result(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  " << r.name << ": " << r.checked << " checked, " << r.failures
     << " failed, worst " << std::setprecision(6) << r.worst;
  if (!r.detail.empty()) os << " (" << r.detail << ")";
  return os.str();
}

}  // namespace whitney
