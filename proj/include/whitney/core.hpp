#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "whitney/errors.hpp"

namespace whitney {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

// First-order polynomial data at one site: value f_a and gradient D_a.
struct Jet {
  double value = 0.0;
  Vector gradient;
};

// f_a + D_a . (x - a)
double jet_eval(const Jet& jet, const Point& base, const Point& x);

struct ValidationIssue {
  ValidationCode code;
  std::string message;
  int i = -1;
  int j = -1;

  [[noreturn]] void raise() const;
};

// Sites with a first-order jet at each one.
class OneField {
 public:
  OneField() = default;
  OneField(int dim, std::vector<Point> sites, std::vector<Jet> jets);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return static_cast<int>(sites_.size()); }
  const std::vector<Point>& sites() const noexcept { return sites_; }
  const std::vector<Jet>& jets() const noexcept { return jets_; }
  const Point& site(int k) const { return sites_[k]; }
  const Jet& jet(int k) const { return jets_[k]; }
  double value(int k) const { return jets_[k].value; }
  const Vector& gradient(int k) const { return jets_[k].gradient; }

 private:
  int dim_ = 0;
  std::vector<Point> sites_;
  std::vector<Jet> jets_;
};

// Sites with values only.
class FunctionData {
 public:
  FunctionData() = default;
  FunctionData(int dim, std::vector<Point> sites, std::vector<double> values);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return static_cast<int>(sites_.size()); }
  const std::vector<Point>& sites() const noexcept { return sites_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const Point& site(int k) const { return sites_[k]; }
  double value(int k) const { return values_[k]; }

 private:
  int dim_ = 0;
  std::vector<Point> sites_;
  std::vector<double> values_;
};

std::optional<ValidationIssue> validate(const OneField& field);
std::optional<ValidationIssue> validate(const FunctionData& data);

// Throw the first violation, if any.
void require_valid(const OneField& field);
void require_valid(const FunctionData& data);

// True when every jet agrees with the jet of site 0 to rel_tol: values at the sites and gradients.
bool is_affine(const OneField& field, double rel_tol = 1e-12);

// Index pair (i, j), i < j, of the first exactly duplicated sites, if any.
std::optional<std::pair<int, int>> find_duplicate_site(const std::vector<Point>& sites);

}  // namespace whitney
