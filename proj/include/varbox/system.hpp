#pragma once

#include <cstddef>
#include <vector>

#include "varbox/box.hpp"
#include "varbox/poly.hpp"

namespace varbox {

/// Z = { x | h_j(x) = 0 for all j, f_j(x) >= 0 for all j }.
struct SemialgebraicSystem {
  std::size_t n = 0;
  std::vector<Polynomial> equalities;
  std::vector<Polynomial> inequalities;

  SemialgebraicSystem() = default;
  SemialgebraicSystem(std::size_t dim, std::vector<Polynomial> eqs,
                      std::vector<Polynomial> ineqs = {});

  /// Throws DimensionError when a polynomial does not live in R^n.
  void validate() const;
  unsigned max_degree() const;
  bool satisfied(std::span<const double> x, double eq_tol, double ineq_tol) const;
  /// Same system under x = center + half .* t.
  SemialgebraicSystem affine_substitute(std::span<const double> center,
                                        std::span<const double> half) const;
};

}  // namespace varbox
