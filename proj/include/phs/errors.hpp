#pragma once

#include <stdexcept>
#include <string>

namespace phs {

// Domain/arity mismatch between a hypothesis and a point or another hypothesis.
class DomainMismatchError : public std::runtime_error {
 public:
  explicit DomainMismatchError(const std::string& what) : std::runtime_error(what) {}
};

// Exact estimation requested for a family pair without a closed form or
// enumerable support.
class UnsupportedExactError : public std::runtime_error {
 public:
  explicit UnsupportedExactError(const std::string& what) : std::runtime_error(what) {}
};

// A cover generator refused to materialize a cover above the size cap.
// Carries the closed-form size that would have been produced.
class CoverSizeError : public std::runtime_error {
 public:
  CoverSizeError(const std::string& what, double size)
      : std::runtime_error(what), size_(size) {}
  double size() const { return size_; }

 private:
  double size_;
};

// Parameter outside a construction's admissible range (e.g. lattice cover
// requires alpha <= 1/30).
class ParameterRangeError : public std::runtime_error {
 public:
  explicit ParameterRangeError(const std::string& what) : std::runtime_error(what) {}
};

// Empty candidate/hypothesis set where at least one element is required.
class EmptyInputError : public std::runtime_error {
 public:
  explicit EmptyInputError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed JSON input (bad schema, missing or ill-typed field).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phs
