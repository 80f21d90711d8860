#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecoreport {

// Base for every error raised by the library. Each subclass corresponds to
// one error class the CLI reports with a distinct diagnostic prefix.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file missing or unreadable.
class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string& what) : Error(what) {}
};

// Malformed input or violated invariant on user-supplied data.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Operation called with a precondition that the caller controls.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

// Matrix not positive definite / numerically unusable.
class ConditioningError : public Error {
 public:
  explicit ConditioningError(const std::string& what) : Error(what) {}
};

class SingularityError : public ConditioningError {
 public:
  SingularityError(const std::string& what, std::size_t pivot)
      : ConditioningError(what), pivot_(pivot) {}
  std::size_t pivot_index() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

// One-way ANOVA with zero within-group variance.
class DegenerateVarianceError : public Error {
 public:
  explicit DegenerateVarianceError(const std::string& what) : Error(what) {}
};

// Parameter outside its admissible range (e.g. non-positive variance).
class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& what) : Error(what) {}
};

}  // namespace ecoreport
