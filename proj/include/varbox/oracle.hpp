#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "varbox/box.hpp"
#include "varbox/interval.hpp"
#include "varbox/poly.hpp"
#include "varbox/system.hpp"

namespace varbox {

/// Natural interval extension, term by term with outward rounding. The
/// result encloses the range of p over b.
Interval interval_evaluate(const Polynomial& p, const Box& b);

/// Upper bound on sup |x^e| over b.
double monomial_sup(const ExponentVector& e, const Box& b);

/// True unless interval arithmetic proves that b holds no point of Z.
bool interval_feasible(const SemialgebraicSystem& sys, const Box& b);

/// Bisection paver: an outer covering of Z within b by boxes of side <= rho.
/// Throws Error once more than `budget` boxes have been visited.
std::vector<Box> pave(const SemialgebraicSystem& sys, const Box& b, double rho,
                      std::size_t budget = 1'000'000);

struct SampleOptions {
  /// Cells per dimension of the seed grid; reduced so the grid stays under max_cells.
  std::size_t grid = 64;
  std::size_t max_cells = 1'000'000;
  /// Points closer than this are merged. 0 picks 1e-6 of the box diameter.
  double separation = 0.0;
  double residual = 1e-10;
  double inequality_slack = 1e-9;
};

/// Points of Z inside b, found by refining grid-cell seeds with damped
/// Gauss-Newton on the equalities. Returns at most `count` points, chosen
/// deterministically. An empty result is legal.
std::vector<Point> sample_variety(const SemialgebraicSystem& sys, const Box& b, std::size_t count,
                                  const SampleOptions& options = {});

struct CoverageReport {
  std::size_t total_samples = 0;
  std::size_t covered = 0;
  std::size_t missed = 0;
  std::vector<Point> missed_points;

  bool complete() const { return missed == 0; }
};

CoverageReport verify_enclosure(const std::vector<Point>& points, const std::vector<Box>& boxes,
                                double inflation);

/// Damped Newton (least squares when overdetermined, minimum norm when
/// underdetermined). Returns a point with max |h_j| <= tol, or nothing.
std::optional<Point> newton_refine(const std::vector<Polynomial>& equalities, const Point& seed,
                                   int max_iters = 50, double tol = 1e-10);

/// One point per row, coordinates at 17 significant digits.
void write_points_csv(std::ostream& os, const std::vector<Point>& points);

/// Connected components of a box list under closed-box overlap within tol.
std::size_t count_components(const std::vector<Box>& boxes, double tol);

}  // namespace varbox
