#pragma once
// SDP instances with known optima, shared by the unit and acceptance tests.

#include <cmath>
#include <utility>
#include <vector>

#include "varbox/sdp.hpp"

namespace varbox::sdp::suite {

inline Matrix mat2(double a, double b, double c) {
  Matrix m(2, 2);
  m << a, b, b, c;
  return m;
}

inline BlockSDP single_block(int n) {
  BlockSDP p;
  p.block_sizes = {n};
  p.objective = BlockMatrix::zeros(p.block_sizes);
  return p;
}

inline Constraint constraint(std::vector<Matrix> blocks, double rhs) {
  return Constraint{BlockMatrix{std::move(blocks)}, rhs};
}

// maximize tr(CX) s.t. tr(X) = 1: the optimum is lambda_max(C)
inline BlockSDP trace_one(const Matrix& c) {
  BlockSDP p = single_block(static_cast<int>(c.rows()));
  p.objective.blocks[0] = c;
  p.constraints.push_back(constraint({Matrix::Identity(c.rows(), c.cols())}, 1.0));
  return p;
}

/// Ten programs paired with their optimal values.
inline std::vector<std::pair<BlockSDP, double>> known_optima() {
  std::vector<std::pair<BlockSDP, double>> suite;
  // 1-4: lambda_max of symmetric matrices
  {
    Matrix c(3, 3);
    c << 2, 1, 0, 1, 2, 1, 0, 1, 2;  // eigenvalues 2, 2 +- sqrt(2)
    suite.emplace_back(trace_one(c), 2 + std::sqrt(2.0));
    suite.emplace_back(trace_one(mat2(0, 1, 0)), 1.0);
    suite.emplace_back(trace_one(mat2(3, 0, -1)), 3.0);
    suite.emplace_back(trace_one(-Matrix::Identity(4, 4)), -1.0);
  }
  // 5: max X12 + X21 with unit diagonal
  {
    BlockSDP p = single_block(2);
    p.objective.blocks[0] = mat2(0, 1, 0);
    p.constraints.push_back(constraint({mat2(1, 0, 0)}, 1.0));
    p.constraints.push_back(constraint({mat2(0, 0, 1)}, 1.0));
    suite.emplace_back(p, 2.0);
  }
  // 6: LP in 1x1 blocks: max x1 + 2 x2 s.t. x1 + x2 = 1
  {
    BlockSDP p;
    p.block_sizes = {1, 1};
    p.objective = BlockMatrix{{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)}};
    p.constraints.push_back({BlockMatrix{{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0)}}, 1.0});
    suite.emplace_back(p, 2.0);
  }
  // 7: two blocks, each maximizing an off-diagonal element with fixed diagonal 2
  {
    BlockSDP p;
    p.block_sizes = {2, 2};
    p.objective = BlockMatrix{{mat2(0, 1, 0), mat2(0, -1, 0)}};
    for (int k = 0; k < 2; ++k) {
      BlockMatrix a = BlockMatrix::zeros(p.block_sizes);
      a.blocks[k] = Matrix::Identity(2, 2);
      p.constraints.push_back({a, 4.0});
    }
    suite.emplace_back(p, 8.0);
  }
  // 8: max-cut style relaxation of a triangle: max sum (1 - X_ij)/2... written as
  //    maximize <-L/4, X> with diag(X) = 1; the optimum for K3 is 9/4
  {
    Matrix lap(3, 3);
    lap << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    BlockSDP p = single_block(3);
    p.objective.blocks[0] = 0.25 * lap;
    for (int i = 0; i < 3; ++i) {
      Matrix a = Matrix::Zero(3, 3);
      a(i, i) = 1.0;
      p.constraints.push_back(constraint({a}, 1.0));
    }
    suite.emplace_back(p, 2.25);
  }
  // 9: minimize trace subject to X >= [[1, 1],[1, 1]] type coupling: max -tr(X) s.t. X12 = 1
  {
    BlockSDP p = single_block(2);
    p.objective.blocks[0] = -Matrix::Identity(2, 2);
    p.constraints.push_back(constraint({mat2(0, 0.5, 0)}, 1.0));
    suite.emplace_back(p, -2.0);
  }
  // 10: nearest correlation-type instance with a mixed 1x1 block
  {
    BlockSDP p;
    p.block_sizes = {2, 1};
    p.objective = BlockMatrix{{mat2(1, 0, 1), Matrix::Constant(1, 1, -1.0)}};
    BlockMatrix a = BlockMatrix::zeros(p.block_sizes);
    a.blocks[0] = Matrix::Identity(2, 2);
    a.blocks[1](0, 0) = -1.0;
    p.constraints.push_back({a, 1.0});  // tr(X0) - x1 = 1
    suite.emplace_back(p, 1.0);
  }
  return suite;
}

/// tr(X) = 1 and tr(X) = 2 at once.
inline BlockSDP contradictory_traces() {
  BlockSDP p = single_block(2);
  p.objective.blocks[0] = mat2(1, 0, 0);
  p.constraints.push_back(constraint({Matrix::Identity(2, 2)}, 1.0));
  p.constraints.push_back(constraint({Matrix::Identity(2, 2)}, 2.0));
  return p;
}

/// max X11 with only X22 fixed.
inline BlockSDP unbounded_primal() {
  BlockSDP p = single_block(2);
  p.objective.blocks[0] = mat2(1, 0, 0);
  p.constraints.push_back(constraint({mat2(0, 0, 1)}, 1.0));
  return p;
}

}  // namespace varbox::sdp::suite
