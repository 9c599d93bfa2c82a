#pragma once

#include <cstddef>
#include <vector>

namespace phs {

enum class DomainKind { FiniteDiscrete, IntegerLattice, RealVector };

// Sample space descriptor. FiniteDiscrete is a symbol set {0..size-1} in one
// coordinate; IntegerLattice and RealVector carry a dimension.
struct Domain {
  DomainKind kind = DomainKind::FiniteDiscrete;
  std::size_t size = 1;  // FiniteDiscrete only
  std::size_t dim = 1;

  static Domain finite_discrete(std::size_t size) {
    return Domain{DomainKind::FiniteDiscrete, size, 1};
  }
  static Domain integer_lattice(std::size_t dim) {
    return Domain{DomainKind::IntegerLattice, 0, dim};
  }
  static Domain real_vector(std::size_t dim) {
    return Domain{DomainKind::RealVector, 0, dim};
  }

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.kind == b.kind && a.size == b.size && a.dim == b.dim;
  }
};

// A point is a flat coordinate vector; discrete symbols are stored as their
// (integral) value in a single coordinate.
using Point = std::vector<double>;

struct Dataset {
  Domain domain;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
};

}  // namespace phs
