#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace whitney {

// Coarse classes used for CLI exit codes.
enum class ErrorCategory { Validation, Degenerate, Solver, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

enum class ValidationCode {
  Empty,
  DuplicateSite,
  DimensionMismatch,
  NonFiniteEntry,
  BadParameter,
  WellsConditionViolated,
  Parse,
};

class ValidationError : public Error {
 public:
  ValidationError(ValidationCode code, const std::string& what, int i = -1, int j = -1)
      : Error(ErrorCategory::Validation, what), code_(code), i_(i), j_(j) {}
  ValidationCode code() const noexcept { return code_; }
  int first() const noexcept { return i_; }
  int second() const noexcept { return j_; }

 private:
  ValidationCode code_;
  int i_, j_;
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& what) : ValidationError(ValidationCode::Parse, what) {}
};

enum class DegenerateCode { DegenerateInput, DegenerateConfiguration, SingularSystem, RankDeficiency };

class DegenerateError : public Error {
 public:
  DegenerateError(DegenerateCode code, const std::string& what, std::vector<int> vertices = {})
      : Error(ErrorCategory::Degenerate, what), code_(code), vertices_(std::move(vertices)) {}
  DegenerateCode code() const noexcept { return code_; }
  const std::vector<int>& vertices() const noexcept { return vertices_; }

 private:
  DegenerateCode code_;
  std::vector<int> vertices_;
};

enum class SolverCode { FactorizationFailure, StepUnderflow, MaxIterations };

class SolverError : public Error {
 public:
  SolverError(SolverCode code, const std::string& what)
      : Error(ErrorCategory::Solver, what), code_(code) {}
  SolverCode code() const noexcept { return code_; }

 private:
  SolverCode code_;
};

// Raised when no cell contains a query point; the cells are supposed to cover space.
class NoCellFound : public Error {
 public:
  explicit NoCellFound(const std::string& what) : Error(ErrorCategory::Internal, what) {}
};

}  // namespace whitney
