#include "whitney/hull.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace whitney {

namespace {

struct Facet {
  std::vector<int> v;   // vertex ids; neighbor[i] is across the ridge that omits v[i]
  std::vector<int> nb;
  Vector n;             // outward unit normal
  double off = 0.0;
  std::vector<int> outside;
  int furthest = -1;
  double furthest_dist = 0.0;
  bool alive = true;
};

class Hull {
 public:
  Hull(const std::vector<Vector>& pts, double rel_tol) : pts_(pts), dim_(static_cast<int>(pts[0].size())) {
    Vector lo = pts[0], hi = pts[0];
    for (const Vector& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    double extent = std::max(1e-300, (hi - lo).maxCoeff());
    tol_ = rel_tol * extent;
  }

  std::vector<HullFacet> run() {
    initial_simplex();
    std::deque<int> queue;
    for (std::size_t f = 0; f < facets_.size(); ++f) {
      if (!facets_[f].outside.empty()) queue.push_back(static_cast<int>(f));
    }
    while (!queue.empty()) {
      int f = queue.front();
      queue.pop_front();
      if (!facets_[f].alive || facets_[f].outside.empty()) continue;
      for (int nf : insert(facets_[f].furthest, f)) {
        if (!facets_[nf].outside.empty()) queue.push_back(nf);
      }
    }
    std::vector<HullFacet> out;
    for (const Facet& f : facets_) {
      if (!f.alive) continue;
      HullFacet h;
      h.vertices = f.v;
      std::sort(h.vertices.begin(), h.vertices.end());
      h.normal = -f.n;
      h.offset = -f.off;
      out.push_back(std::move(h));
    }
    std::sort(out.begin(), out.end(),
              [](const HullFacet& a, const HullFacet& b) { return a.vertices < b.vertices; });
    return out;
  }

 private:
  // Distance above the facet plane, re-evaluated in extended precision near zero.
  double distance(const Facet& f, int p) const {
    double d = f.n.dot(pts_[p]) - f.off;
    if (std::abs(d) > 4.0 * tol_) return d;
    std::vector<Vector> with_p, with_n;
    for (int v : f.v) {
      with_p.push_back(pts_[v]);
      with_n.push_back(pts_[v]);
    }
    with_p.push_back(pts_[p]);
    with_n.push_back(pts_[f.v[0]] + f.n);
    long double num = orientation(with_p);
    long double den = orientation(with_n);
    if (den == 0.0L) return d;
    return static_cast<double>(num / den);
  }

  int make_facet(std::vector<int> verts) {
    Facet f;
    Matrix a(dim_, dim_ - 1);
    for (int i = 1; i < dim_; ++i) a.col(i - 1) = pts_[verts[i]] - pts_[verts[0]];
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(dim_, dim_);
    f.n = q.col(dim_ - 1);
    f.off = f.n.dot(pts_[verts[0]]);
    if (f.n.dot(interior_) - f.off > 0.0) {
      f.n = -f.n;
      f.off = -f.off;
    }
    f.v = std::move(verts);
    f.nb.assign(dim_, -1);
    facets_.push_back(std::move(f));
    return static_cast<int>(facets_.size()) - 1;
  }

  void assign(int p, const std::vector<int>& candidates) {
    for (int c : candidates) {
      Facet& f = facets_[c];
      double d = distance(f, p);
      if (d > tol_) {
        f.outside.push_back(p);
        if (f.furthest < 0 || d > f.furthest_dist) {
          f.furthest = p;
          f.furthest_dist = d;
        }
        return;
      }
    }
  }

  void initial_simplex() {
    const int n = static_cast<int>(pts_.size());
    std::vector<int> chosen;
    int first = 0;
    for (int i = 1; i < n; ++i) {
      if (pts_[i][0] < pts_[first][0]) first = i;
    }
    chosen.push_back(first);
    std::vector<Vector> basis;
    for (int r = 0; r < dim_; ++r) {
      int best = -1;
      double best_res = 0.0;
      Vector best_vec;
      for (int i = 0; i < n; ++i) {
        Vector res = pts_[i] - pts_[first];
        for (int pass = 0; pass < 2; ++pass) {
          for (const Vector& q : basis) res -= q.dot(res) * q;
        }
        double len = res.norm();
        if (len > best_res) {
          best_res = len;
          best = i;
          best_vec = res;
        }
      }
      if (best < 0 || best_res <= tol_) {
        throw DegenerateError(DegenerateCode::DegenerateInput,
                              "convex_hull: points lie in a lower-dimensional affine subspace");
      }
      basis.push_back(best_vec / best_res);
      chosen.push_back(best);
    }
    interior_ = Vector::Zero(dim_);
    for (int c : chosen) interior_ += pts_[c];
    interior_ /= static_cast<double>(chosen.size());

    // Facet i omits chosen[i]; its neighbor across the ridge omitting chosen[k] is facet k.
    std::vector<int> ids;
    for (int i = 0; i <= dim_; ++i) {
      std::vector<int> verts;
      for (int k = 0; k <= dim_; ++k) {
        if (k != i) verts.push_back(chosen[k]);
      }
      ids.push_back(make_facet(verts));
    }
    for (int i = 0; i <= dim_; ++i) {
      Facet& f = facets_[ids[i]];
      for (int s = 0; s < dim_; ++s) {
        int k = static_cast<int>(std::find(chosen.begin(), chosen.end(), f.v[s]) - chosen.begin());
        f.nb[s] = ids[k];
      }
    }
    std::vector<char> used(n, 0);
    for (int c : chosen) used[c] = 1;
    for (int p = 0; p < n; ++p) {
      if (!used[p]) assign(p, ids);
    }
  }

  std::vector<int> insert(int p, int start) {
    ++epoch_;
    visit_.resize(facets_.size(), 0);
    visible_flag_.resize(facets_.size(), 0);
    std::vector<int> visible{start};
    visit_[start] = epoch_;
    visible_flag_[start] = 1;
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const Facet& f = facets_[visible[i]];
      for (int h : f.nb) {
        if (visit_[h] == epoch_) continue;
        visit_[h] = epoch_;
        bool vis = distance(facets_[h], p) > tol_;
        visible_flag_[h] = vis ? 1 : 0;
        if (vis) visible.push_back(h);
      }
    }

    std::vector<int> created;
    std::map<std::vector<int>, std::pair<int, int>> ridges;
    for (int g : visible) {
      for (int s = 0; s < dim_; ++s) {
        int h = facets_[g].nb[s];
        if (visible_flag_[h] && visit_[h] == epoch_) continue;
        std::vector<int> verts;
        for (int t = 0; t < dim_; ++t) {
          if (t != s) verts.push_back(facets_[g].v[t]);
        }
        verts.push_back(p);
        int nf = make_facet(verts);
        created.push_back(nf);
        Facet& fresh = facets_[nf];
        fresh.nb[dim_ - 1] = h;
        for (int& back : facets_[h].nb) {
          if (back == g) back = nf;
        }
        for (int r = 0; r < dim_ - 1; ++r) {
          std::vector<int> key;
          for (int t = 0; t < dim_; ++t) {
            if (t != r) key.push_back(fresh.v[t]);
          }
          std::sort(key.begin(), key.end());
          auto it = ridges.find(key);
          if (it == ridges.end()) {
            ridges.emplace(std::move(key), std::pair{nf, r});
          } else {
            facets_[nf].nb[r] = it->second.first;
            facets_[it->second.first].nb[it->second.second] = nf;
            ridges.erase(it);
          }
        }
      }
    }
    visit_.resize(facets_.size(), 0);
    visible_flag_.resize(facets_.size(), 0);

    for (int g : visible) {
      Facet& f = facets_[g];
      f.alive = false;
      std::vector<int> pending;
      pending.swap(f.outside);
      for (int q : pending) {
        if (q != p) assign(q, created);
      }
    }
    return created;
  }

  const std::vector<Vector>& pts_;
  int dim_;
  double tol_ = 0.0;
  Vector interior_;
  std::vector<Facet> facets_;
  std::vector<int> visit_;
  std::vector<char> visible_flag_;
  int epoch_ = 0;
};

}  // namespace

std::vector<HullFacet> convex_hull(const std::vector<Vector>& points, double rel_tol) {
  if (points.empty()) throw DegenerateError(DegenerateCode::DegenerateInput, "convex_hull: no points");
  const Eigen::Index dim = points[0].size();
  if (dim < 2) throw DegenerateError(DegenerateCode::DegenerateInput, "convex_hull: dimension must be >= 2");
  for (const Vector& p : points) {
    if (p.size() != dim) throw ValidationError(ValidationCode::DimensionMismatch, "convex_hull: ragged points");
    if (!p.allFinite()) throw ValidationError(ValidationCode::NonFiniteEntry, "convex_hull: non-finite point");
  }
  if (static_cast<Eigen::Index>(points.size()) < dim + 1) {
    throw DegenerateError(DegenerateCode::DegenerateInput, "convex_hull: too few points");
  }
  return Hull(points, rel_tol).run();
}

std::vector<HullFacet> lower_hull(const std::vector<HullFacet>& facets) {
  std::vector<HullFacet> out;
  for (const HullFacet& f : facets) {
    if (f.normal[f.normal.size() - 1] > 1e-12) out.push_back(f);
  }
  return out;
}

}  // namespace whitney
