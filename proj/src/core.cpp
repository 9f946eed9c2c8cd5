#include "whitney/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace whitney {

double jet_eval(const Jet& jet, const Point& base, const Point& x) {
  if (base.size() != x.size() || jet.gradient.size() != x.size()) {
    throw ValidationError(ValidationCode::DimensionMismatch, "jet_eval: dimension mismatch");
  }
  return jet.value + jet.gradient.dot(x - base);
}

void ValidationIssue::raise() const { throw ValidationError(code, message, i, j); }

OneField::OneField(int dim, std::vector<Point> sites, std::vector<Jet> jets)
    : dim_(dim), sites_(std::move(sites)), jets_(std::move(jets)) {}

FunctionData::FunctionData(int dim, std::vector<Point> sites, std::vector<double> values)
    : dim_(dim), sites_(std::move(sites)), values_(std::move(values)) {}

std::optional<std::pair<int, int>> find_duplicate_site(const std::vector<Point>& sites) {
  std::vector<int> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](int a, int b) {
    const Point& p = sites[a];
    const Point& q = sites[b];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] != q[i]) return p[i] < q[i];
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  std::optional<std::pair<int, int>> best;
  for (std::size_t r = 0; r + 1 < order.size(); ++r) {
    if (sites[order[r]] == sites[order[r + 1]]) {
      // Within a run of equal sites the indices are ascending.
      std::pair<int, int> candidate{order[r], order[r + 1]};
      if (!best || candidate < *best) best = candidate;
    }
  }
  return best;
}

namespace {

std::optional<ValidationIssue> check_sites(int dim, const std::vector<Point>& sites,
                                           std::size_t value_count) {
  if (dim <= 0) {
    return ValidationIssue{ValidationCode::DimensionMismatch, "dimension must be positive"};
  }
  if (sites.empty()) return ValidationIssue{ValidationCode::Empty, "no sites"};
  if (value_count != sites.size()) {
    return ValidationIssue{ValidationCode::DimensionMismatch,
                           "number of values does not match number of sites"};
  }
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k].size() != dim) {
      std::ostringstream os;
      os << "site " << k << " has length " << sites[k].size() << ", expected " << dim;
      return ValidationIssue{ValidationCode::DimensionMismatch, os.str(), static_cast<int>(k)};
    }
    if (!sites[k].allFinite()) {
      return ValidationIssue{ValidationCode::NonFiniteEntry,
                             "site " + std::to_string(k) + " has a non-finite coordinate",
                             static_cast<int>(k)};
    }
  }
  return std::nullopt;
}

std::optional<ValidationIssue> check_duplicates(const std::vector<Point>& sites) {
  if (auto dup = find_duplicate_site(sites)) {
    std::ostringstream os;
    os << "sites " << dup->first << " and " << dup->second << " coincide";
    return ValidationIssue{ValidationCode::DuplicateSite, os.str(), dup->first, dup->second};
  }
  return std::nullopt;
}

}  // namespace

std::optional<ValidationIssue> validate(const OneField& field) {
  if (auto issue = check_sites(field.dim(), field.sites(), field.jets().size())) return issue;
  for (int k = 0; k < field.size(); ++k) {
    const Jet& jet = field.jet(k);
    if (jet.gradient.size() != field.dim()) {
      return ValidationIssue{ValidationCode::DimensionMismatch,
                             "gradient " + std::to_string(k) + " has the wrong length", k};
    }
    if (!std::isfinite(jet.value) || !jet.gradient.allFinite()) {
      return ValidationIssue{ValidationCode::NonFiniteEntry,
                             "jet " + std::to_string(k) + " has a non-finite entry", k};
    }
  }
  return check_duplicates(field.sites());
}

std::optional<ValidationIssue> validate(const FunctionData& data) {
  if (auto issue = check_sites(data.dim(), data.sites(), data.values().size())) return issue;
  for (int k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data.value(k))) {
      return ValidationIssue{ValidationCode::NonFiniteEntry,
                             "value " + std::to_string(k) + " is not finite", k};
    }
  }
  return check_duplicates(data.sites());
}

void require_valid(const OneField& field) {
  if (auto issue = validate(field)) issue->raise();
}

void require_valid(const FunctionData& data) {
  if (auto issue = validate(data)) issue->raise();
}

bool is_affine(const OneField& field, double rel_tol) {
  const Jet& base = field.jet(0);
  const double gscale = 1.0 + base.gradient.cwiseAbs().maxCoeff();
  for (int k = 1; k < field.size(); ++k) {
    double v = jet_eval(base, field.site(0), field.site(k));
    if (std::abs(v - field.value(k)) > rel_tol * (1.0 + std::abs(field.value(k)))) return false;
    if ((field.gradient(k) - base.gradient).cwiseAbs().maxCoeff() > rel_tol * gscale) return false;
  }
  return true;
}

}  // namespace whitney
