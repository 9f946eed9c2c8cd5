#include "whitney/gamma.hpp"

#include <cmath>

#include "parallel.hpp"

namespace whitney {

namespace {

void check_pair(const OneField& field, int j, int k) {
  if (j < 0 || k < 0 || j >= field.size() || k >= field.size()) {
    throw ValidationError(ValidationCode::BadParameter, "pair index out of range", j, k);
  }
  if (j == k) throw ValidationError(ValidationCode::BadParameter, "pair requires j != k", j, k);
}

struct PairTerms {
  double A;
  double B;
};

PairTerms pair_terms(const OneField& field, int j, int k) {
  const Point& a = field.site(j);
  const Point& b = field.site(k);
  const Jet& pa = field.jet(j);
  const Jet& pb = field.jet(k);
  Vector ab = b - a;
  double r2 = ab.squaredNorm();
  // P_a(a) - P_b(a) + P_a(b) - P_b(b) = 2(f_a - f_b) + (D_a + D_b).(b - a)
  double num = 2.0 * (pa.value - pb.value) + (pa.gradient + pb.gradient).dot(ab);
  return {std::abs(num) / r2, (pa.gradient - pb.gradient).norm() / std::sqrt(r2)};
}

double a_tilde(const OneField& field, int j, int k) {
  const Point& a = field.site(j);
  const Point& b = field.site(k);
  // P_a(a) - P_b(a) = f_a - f_b - D_b.(a - b)
  Vector ba = a - b;
  double num = field.value(j) - field.value(k) - field.gradient(k).dot(ba);
  return std::abs(num) / ba.squaredNorm();
}

}  // namespace

double functional_A(const OneField& field, int j, int k) {
  check_pair(field, j, k);
  return pair_terms(field, j, k).A;
}

double functional_B(const OneField& field, int j, int k) {
  check_pair(field, j, k);
  return pair_terms(field, j, k).B;
}

double functional_A_tilde(const OneField& field, int j, int k) {
  check_pair(field, j, k);
  return a_tilde(field, j, k);
}

GammaBreakdown gamma1_exact(const OneField& field) {
  require_valid(field);
  const int n = field.size();
  GammaBreakdown out;
  if (n == 1) return out;
  auto best = detail::parallel_argmax(n, static_cast<std::size_t>(n) * n, [&](int j, detail::ArgMax& acc) {
    for (int k = j + 1; k < n; ++k) {
      PairTerms t = pair_terms(field, j, k);
      acc.offer(combine_AB(t.A, t.B), j, k);
    }
  });
  PairTerms t = pair_terms(field, best.j, best.k);
  out.value = best.value;
  out.argmax_pair = {best.j, best.k};
  out.A_at_max = t.A;
  out.B_at_max = t.B;
  return out;
}

double gamma1_sup_sample(const OneField& field, const std::vector<Point>& probes) {
  require_valid(field);
  if (probes.empty()) throw ValidationError(ValidationCode::BadParameter, "no probes");
  const int n = field.size();
  std::vector<double> poly(n), dist2(n);
  double best = 0.0;
  for (const Point& x : probes) {
    if (x.size() != field.dim()) {
      throw ValidationError(ValidationCode::DimensionMismatch, "probe has the wrong length");
    }
    for (int a = 0; a < n; ++a) {
      poly[a] = jet_eval(field.jet(a), field.site(a), x);
      dist2[a] = (field.site(a) - x).squaredNorm();
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        double den = dist2[a] + dist2[b];
        if (den == 0.0) continue;
        best = std::max(best, 2.0 * std::abs(poly[a] - poly[b]) / den);
      }
    }
  }
  return best;
}

double gamma1_tilde(const OneField& field) {
  require_valid(field);
  const int n = field.size();
  if (n == 1) return 0.0;
  auto best = detail::parallel_argmax(n, static_cast<std::size_t>(n) * n, [&](int j, detail::ArgMax& acc) {
    for (int k = j + 1; k < n; ++k) {
      double v = std::max({a_tilde(field, j, k), a_tilde(field, k, j), pair_terms(field, j, k).B});
      acc.offer(v, j, k);
    }
  });
  return best.value;
}

WellsCheck wells_condition_check(const OneField& field, double M) {
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw ValidationError(ValidationCode::BadParameter, "wells_condition_check requires M > 0");
  }
  require_valid(field);
  const int n = field.size();
  constexpr double kSlack = 1e-12;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      Vector ba = field.site(b) - field.site(a);
      const Vector& da = field.gradient(a);
      const Vector& db = field.gradient(b);
      double fa = field.value(a), fb = field.value(b);
      double mid = 0.5 * (da + db).dot(ba);
      double quad = 0.25 * M * ba.squaredNorm();
      double grad = (da - db).squaredNorm() / (4.0 * M);
      double rhs = fa + mid + quad - grad;
      double scale = std::abs(fa) + std::abs(fb) + std::abs(mid) + quad + grad;
      if (fb > rhs + kSlack * scale) return {false, std::pair{a, b}};
    }
  }
  return {};
}

}  // namespace whitney
