#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "varbox/box.hpp"
#include "varbox/poly.hpp"
#include "varbox/sdp.hpp"
#include "varbox/system.hpp"

namespace varbox {

/// Generators of the quadratic module for Z within a box, in this order:
/// 1, x_j - l_j, u_j - x_j, h_j, -h_j, f_j, N - sum x_j^2.
struct ConstraintSet {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<Polynomial> e;
  long long ball_bound = 0;
  Box box;

  /// Number of generators after e_0, 2n + 2k + m + 1.
  std::size_t c() const { return e.size() - 1; }
  std::vector<Polynomial> equalities() const;
  unsigned max_degree() const;
};

ConstraintSet build_constraints(const SemialgebraicSystem& system, const Box& box);

enum class Direction { Min, Max };

struct RelaxationSpec {
  unsigned degree = 0;
  /// d_j = max{ w >= 0 : 2w + deg e_j <= d }.
  std::vector<unsigned> block_degrees;
  std::vector<ExponentVector> basis;
  std::map<ExponentVector, std::size_t, GradedLexLess> index;
  ExponentVector objective_index;
  Direction direction = Direction::Min;
};

/// Throws varbox::Error when d is below the degree of some generator.
RelaxationSpec make_spec(const ConstraintSet& cs, unsigned d, std::size_t objective_var,
                         Direction direction);

/// The SOS side as a block SDP: X holds one Gram block per generator, and
/// each constraint row matches the coefficient of one monomial x^a, a != 0.
/// Right-hand sides are +1 (min) or -1 (max) at the objective monomial and 0
/// elsewhere. The objective is minus the constant-term row, so the optimum is
/// the best bound on +-x_i. Generators are divided by their largest coefficient.
sdp::BlockSDP build_relaxation(const ConstraintSet& cs, unsigned d, std::size_t objective_var,
                               Direction direction);

enum class BoundStatus {
  Certified,      // bound is a rigorous outer bound
  Empty,          // Z within the box is certified empty
  Uninformative,  // solver failed; bound is the box edge
};

struct MomentSolution {
  BoundStatus status = BoundStatus::Uninformative;
  sdp::Status solver_status = sdp::Status::NumericalLimit;
  Direction direction = Direction::Min;
  std::size_t variable = 0;
  /// Certified bound on x_i: below its minimum (Min) or above its maximum (Max).
  double bound = 0.0;
  RelaxationSpec spec;
  /// Moments indexed like spec.basis, moments[0] = 1.
  sdp::Vector moments;
  sdp::Matrix moment_matrix;
  std::vector<sdp::Matrix> gram_blocks;
  ConstraintSet constraints;
  /// Affine map x = center + half .* t from the frame of `constraints` back to
  /// the caller's coordinates. Empty for the identity.
  Point center;
  Point half;
};

struct RelaxationOptions {
  double solver_tol = 1e-8;
  /// Eigenvalue ratio below which the moment matrix counts as rank one.
  double rank_ratio = 1e-2;
  double feasibility_slack = 1e-4;
};

/// Certified bound on min or max of x_i over Z within cs.box.
MomentSolution bound(const ConstraintSet& cs, unsigned d, std::size_t i, Direction direction,
                     const RelaxationOptions& options = {});

/// As bound(), but builds the relaxation on the box mapped onto [-1, 1]^n and
/// reports the bound in the original coordinates.
MomentSolution bound_in_box(const SemialgebraicSystem& system, const Box& box, unsigned d,
                            std::size_t i, Direction direction,
                            const RelaxationOptions& options = {});

/// True only when a validated certificate shows that Z within cs.box is
/// empty. False means unknown.
bool detect_empty(const ConstraintSet& cs, unsigned d, const RelaxationOptions& options = {});

/// detect_empty on the box mapped onto [-1, 1]^n.
bool detect_empty_in_box(const SemialgebraicSystem& system, const Box& box, unsigned d,
                         const RelaxationOptions& options = {});

/// First-order moments as a point, if the moment matrix is close to rank one
/// and the Newton-refined point satisfies every generator up to the slack.
std::optional<Point> extract_minimizer(const MomentSolution& sol,
                                       const RelaxationOptions& options = {});

/// First-order moments mapped to the caller's coordinates, without checks.
std::optional<Point> first_moments(const MomentSolution& sol);

}  // namespace varbox
