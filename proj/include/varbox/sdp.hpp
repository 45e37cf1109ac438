#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace varbox::sdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric block-diagonal matrix stored block by block.
struct BlockMatrix {
  std::vector<Matrix> blocks;

  static BlockMatrix zeros(const std::vector<int>& sizes);
  static BlockMatrix identity(const std::vector<int>& sizes, double scale = 1.0);

  /// Frobenius inner product <A, B>.
  double dot(const BlockMatrix& other) const;
  double trace() const;
  double max_abs() const;
};

struct Constraint {
  BlockMatrix a;
  double rhs = 0.0;
};

/// maximize tr(C X)  subject to  tr(A_i X) = a_i,  X block-diagonal PSD.
/// Its dual is  minimize a^T y  subject to  sum_i y_i A_i - C = S PSD.
struct BlockSDP {
  std::vector<int> block_sizes;
  BlockMatrix objective;
  std::vector<Constraint> constraints;

  /// Throws varbox::Error on malformed block structure or a non-symmetric block.
  void validate() const;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, NumericalLimit };

std::string to_string(Status s);

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.95;
};

struct SDPSolution {
  Status status = Status::NumericalLimit;
  /// For DualInfeasible, X is an improving ray normalized to tr(C X) = 1.
  BlockMatrix X;
  /// For PrimalInfeasible, y is a Farkas ray normalized to a^T y = -1.
  Vector y;
  BlockMatrix S;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  /// Dual objective backed by a PSD check of the dual slack; an upper bound
  /// on the primal optimum.
  std::optional<double> certified_dual_bound;
  int iterations = 0;
};

SDPSolution solve(const BlockSDP& prog, double tol);
SDPSolution solve(const BlockSDP& prog, const SolverOptions& options = {});

/// 1e-9 times the trace norm of C, floored at 1e-12.
double default_margin(const BlockSDP& prog);

/// Forms the dual slack S = sum_i y_i A_i - C and checks S + margin*I > 0 with
/// a pivoted LDL^T factorization. On success returns a^T y, which no primal
/// feasible X can exceed; otherwise std::nullopt.
std::optional<double> certify_dual_bound(const BlockSDP& prog, const Vector& y,
                                         std::optional<double> margin = std::nullopt);

/// True when M + shift*I admits a pivoted LDL^T with strictly positive pivots.
bool verify_psd(const Matrix& m, double shift = 0.0);

/// Sparse text dump compatible with the SDPA sparse layout:
///   m, number of blocks, block sizes, rhs vector, then one line per nonzero
///   upper-triangular entry "constraint block row col value" (1-based,
///   constraint 0 is the objective).
void write_sparse(std::ostream& os, const BlockSDP& prog);

/// Number of solve() calls made by this process (all threads).
std::uint64_t solve_count();

}  // namespace varbox::sdp
