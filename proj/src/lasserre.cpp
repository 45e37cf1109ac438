#include "varbox/lasserre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "varbox/error.hpp"
#include "varbox/oracle.hpp"

namespace varbox {

using sdp::BlockMatrix;
using sdp::BlockSDP;
using sdp::Matrix;

std::vector<Polynomial> ConstraintSet::equalities() const {
  return {e.begin() + static_cast<std::ptrdiff_t>(1 + 2 * n),
          e.begin() + static_cast<std::ptrdiff_t>(1 + 2 * n + k)};
}

unsigned ConstraintSet::max_degree() const {
  unsigned d = 0;
  for (std::size_t j = 1; j < e.size(); ++j) d = std::max(d, e[j].degree());
  return d;
}

ConstraintSet build_constraints(const SemialgebraicSystem& system, const Box& box) {
  system.validate();
  const std::size_t n = system.n;
  if (box.dimension() != n) throw DimensionError("system/box dimension mismatch");
  ConstraintSet cs;
  cs.n = n;
  cs.k = system.equalities.size();
  cs.m = system.inequalities.size();
  cs.box = box;
  cs.e.push_back(Polynomial::constant(n, 1.0));
  for (std::size_t j = 0; j < n; ++j) {
    cs.e.push_back(Polynomial::variable(n, j) - Polynomial::constant(n, box.lower(j)));
  }
  for (std::size_t j = 0; j < n; ++j) {
    cs.e.push_back(Polynomial::constant(n, box.upper(j)) - Polynomial::variable(n, j));
  }
  for (const auto& h : system.equalities) cs.e.push_back(h);
  for (const auto& h : system.equalities) cs.e.push_back(-h);
  for (const auto& f : system.inequalities) cs.e.push_back(f);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += box.lower(j) * box.lower(j) + box.upper(j) * box.upper(j);
  cs.ball_bound = static_cast<long long>(std::ceil(s));
  Polynomial ball = Polynomial::constant(n, static_cast<double>(cs.ball_bound));
  for (std::size_t j = 0; j < n; ++j) ball = ball - Polynomial::variable(n, j).pow(2);
  cs.e.push_back(std::move(ball));
  return cs;
}

RelaxationSpec make_spec(const ConstraintSet& cs, unsigned d, std::size_t objective_var,
                         Direction direction) {
  if (objective_var >= cs.n) throw DimensionError("objective variable out of range");
  if (d < std::max(cs.max_degree(), 1u)) {
    throw Error("relaxation degree " + std::to_string(d) + " is below the generator degree " +
                std::to_string(cs.max_degree()));
  }
  RelaxationSpec spec;
  spec.degree = d;
  spec.direction = direction;
  for (const auto& ej : cs.e) spec.block_degrees.push_back((d - ej.degree()) / 2);
  spec.basis = monomial_basis(cs.n, d);
  for (std::size_t i = 0; i < spec.basis.size(); ++i) spec.index.emplace(spec.basis[i], i);
  spec.objective_index.assign(cs.n, 0);
  spec.objective_index[objective_var] = 1;
  return spec;
}

namespace {

ExponentVector add(const ExponentVector& a, const ExponentVector& b) {
  ExponentVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

// The relaxation together with what is needed to certify any iterate.
struct Relaxation {
  RelaxationSpec spec;
  BlockSDP prog;
  // monomial of each SDP row; rows past the end of this list are not monomial rows
  std::vector<ExponentVector> row_monomial;
  BlockMatrix a0;
  // generator behind each SDP block, after rescaling
  std::vector<Polynomial> generator;
  std::vector<std::vector<ExponentVector>> block_basis;
};

Relaxation make_relaxation(const ConstraintSet& cs, unsigned d, std::size_t i, Direction dir) {
  Relaxation r;
  r.spec = make_spec(cs, d, i, dir);
  const std::size_t nb = r.spec.basis.size();
  for (std::size_t j = 0; j < cs.e.size(); ++j) {
    if (cs.e[j].is_zero()) continue;  // contributes nothing to the module
    r.generator.push_back(cs.e[j].scaled(1.0 / cs.e[j].max_abs_coefficient()));
    r.block_basis.push_back(monomial_basis(cs.n, r.spec.block_degrees[j]));
    r.prog.block_sizes.push_back(static_cast<int>(r.block_basis.back().size()));
  }
  const std::size_t blocks = r.generator.size();
  std::vector<BlockMatrix> a(nb, BlockMatrix::zeros(r.prog.block_sizes));
  std::vector<char> used(nb, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto& basis = r.block_basis[b];
    for (std::size_t p = 0; p < basis.size(); ++p) {
      for (std::size_t q = p; q < basis.size(); ++q) {
        const ExponentVector bg = add(basis[p], basis[q]);
        for (const auto& [delta, coef] : r.generator[b].terms()) {
          const std::size_t row = r.spec.index.at(add(bg, delta));
          a[row].blocks[b](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) += coef;
          if (p != q) a[row].blocks[b](static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) += coef;
          used[row] = 1;
        }
      }
    }
  }
  const std::size_t obj_row = r.spec.index.at(r.spec.objective_index);
  if (!used[obj_row]) throw Error("objective monomial does not occur in the relaxation");
  r.a0 = a[0];
  r.prog.objective = a[0];
  for (auto& blk : r.prog.objective.blocks) blk = -blk;
  for (std::size_t row = 1; row < nb; ++row) {
    if (!used[row]) continue;
    const double rhs = row == obj_row ? (dir == Direction::Min ? 1.0 : -1.0) : 0.0;
    r.prog.constraints.push_back({std::move(a[row]), rhs});
    r.row_monomial.push_back(r.spec.basis[row]);
  }
  return r;
}

// Rigorous lower bound on sum_a rhs_a x^a over Z within `box`, valid for any
// X: from sum_j b_j' Q_j b_j e_j = tr(A_0 X) + sum_a tr(A_a X) x^a, which is
// >= minus the negative-eigenvalue allowance wherever every e_j >= 0.
double certify_iterate(const Relaxation& r, const BlockMatrix& x, const Box& box) {
  double allowance = 0.0;
  double absmass = 0.0;
  auto absdot = [&](const BlockMatrix& a) {
    double s = 0.0;
    for (std::size_t b = 0; b < a.blocks.size(); ++b) {
      s += (a.blocks[b].cwiseAbs().array() * x.blocks[b].cwiseAbs().array()).sum();
    }
    return s;
  };
  const double s0 = r.a0.dot(x);
  absmass += absdot(r.a0);
  double lower = -s0;
  for (std::size_t row = 0; row < r.row_monomial.size(); ++row) {
    const auto& c = r.prog.constraints[row];
    const double sup = monomial_sup(r.row_monomial[row], box);
    lower -= std::abs(c.rhs - c.a.dot(x)) * sup;
    absmass += absdot(c.a) * sup;
  }
  allowance += 1e-12 * absmass + 1e-300;

  for (std::size_t b = 0; b < x.blocks.size(); ++b) {
    const Matrix& q = x.blocks[b];
    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    const double scale = q.cwiseAbs().maxCoeff();
    double delta = std::max(0.0, -es.eigenvalues()(0)) + 1e-13 * scale * static_cast<double>(q.rows());
    int tries = 0;
    while (!sdp::verify_psd(q, delta) && tries++ < 20) delta = 2.0 * delta + 1e-300;
    if (tries > 20) return -std::numeric_limits<double>::infinity();
    if (delta == 0.0) continue;
    double basis_sup = 0.0;
    for (const auto& beta : r.block_basis[b]) basis_sup += monomial_sup(add(beta, beta), box);
    const double gen_sup = std::max(0.0, interval_evaluate(r.generator[b], box).hi);
    allowance += delta * basis_sup * gen_sup;
  }
  const double out = lower - allowance;
  return std::isfinite(out) ? out - 1e-15 * std::abs(out) : -std::numeric_limits<double>::infinity();
}

bool finite(const BlockMatrix& m) {
  for (const auto& b : m.blocks) {
    if (!b.allFinite()) return false;
  }
  return !m.blocks.empty();
}

// Zero right-hand sides: a certified lower bound > 0 on the constant 0 means Z is empty.
double certify_empty(Relaxation r, const BlockMatrix& x, const Box& box) {
  for (auto& c : r.prog.constraints) c.rhs = 0.0;
  return certify_iterate(r, x, box);
}

double outward(double v, bool down) {
  const double pad = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v) + 1e-300;
  return down ? v - pad : v + pad;
}

}  // namespace

BlockSDP build_relaxation(const ConstraintSet& cs, unsigned d, std::size_t objective_var,
                          Direction direction) {
  return make_relaxation(cs, d, objective_var, direction).prog;
}

MomentSolution bound(const ConstraintSet& cs, unsigned d, std::size_t i, Direction direction,
                     const RelaxationOptions& options) {
  Relaxation r = make_relaxation(cs, d, i, direction);
  MomentSolution out;
  out.direction = direction;
  out.variable = i;
  out.spec = r.spec;
  out.constraints = cs;
  const double edge = direction == Direction::Min ? cs.box.lower(i) : cs.box.upper(i);
  out.bound = edge;

  sdp::SolverOptions so;
  so.tol = options.solver_tol;
  const sdp::SDPSolution sol = sdp::solve(r.prog, so);
  out.solver_status = sol.status;

  if (sol.status == sdp::Status::DualInfeasible) {
    if (finite(sol.X) && certify_empty(r, sol.X, cs.box) > 0.0) out.status = BoundStatus::Empty;
    return out;
  }
  if (sol.status == sdp::Status::PrimalInfeasible || !finite(sol.X)) return out;

  const double lower = certify_iterate(r, sol.X, cs.box);  // on +-x_i
  if (std::isfinite(lower)) {
    const double value = direction == Direction::Min ? lower : -lower;
    const bool better = direction == Direction::Min ? value > edge : value < edge;
    if (better) out.bound = value;
    if (better || sol.status == sdp::Status::Optimal) out.status = BoundStatus::Certified;
  }

  out.gram_blocks = sol.X.blocks;
  out.moments = sdp::Vector::Zero(static_cast<Eigen::Index>(r.spec.basis.size()));
  out.moments(0) = 1.0;
  for (std::size_t row = 0; row < r.row_monomial.size(); ++row) {
    out.moments(static_cast<Eigen::Index>(r.spec.index.at(r.row_monomial[row]))) =
        sol.y(static_cast<Eigen::Index>(row));
  }
  if (!sol.S.blocks.empty()) out.moment_matrix = sol.S.blocks[0];
  return out;
}

bool detect_empty(const ConstraintSet& cs, unsigned d, const RelaxationOptions& options) {
  Relaxation r = make_relaxation(cs, d, 0, Direction::Min);
  for (auto& c : r.prog.constraints) c.rhs = 0.0;
  r.prog.constraints.push_back({BlockMatrix::identity(r.prog.block_sizes), 1.0});
  sdp::SolverOptions so;
  so.tol = options.solver_tol;
  const sdp::SDPSolution sol = sdp::solve(r.prog, so);
  if (!finite(sol.X)) return false;
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::NumericalLimit) return false;
  return certify_iterate(r, sol.X, cs.box) > 0.0;
}

namespace {

struct Normalized {
  SemialgebraicSystem system;
  Box box;
  Point center;
  Point half;
};

Normalized normalize(const SemialgebraicSystem& system, const Box& box) {
  if (box.dimension() != system.n) throw DimensionError("system/box dimension mismatch");
  Normalized nz;
  nz.center = box.center();
  nz.half = box.half_widths();
  nz.system = system.affine_substitute(nz.center, nz.half);
  nz.box = Box::cube(system.n, -1.0, 1.0);
  return nz;
}

}  // namespace

MomentSolution bound_in_box(const SemialgebraicSystem& system, const Box& box, unsigned d,
                            std::size_t i, Direction direction, const RelaxationOptions& options) {
  if (i >= box.dimension()) throw DimensionError("objective variable out of range");
  Normalized nz = normalize(system, box);
  if (nz.half[i] == 0.0) {
    MomentSolution out;
    out.status = BoundStatus::Certified;
    out.direction = direction;
    out.variable = i;
    out.bound = box.lower(i);
    return out;
  }
  MomentSolution sol = bound(build_constraints(nz.system, nz.box), d, i, direction, options);
  const double v = nz.center[i] + nz.half[i] * sol.bound;
  sol.bound = outward(v, direction == Direction::Min);
  if (sol.status == BoundStatus::Uninformative) {
    sol.bound = direction == Direction::Min ? box.lower(i) : box.upper(i);
  }
  sol.center = std::move(nz.center);
  sol.half = std::move(nz.half);
  return sol;
}

bool detect_empty_in_box(const SemialgebraicSystem& system, const Box& box, unsigned d,
                         const RelaxationOptions& options) {
  Normalized nz = normalize(system, box);
  return detect_empty(build_constraints(nz.system, nz.box), d, options);
}

namespace {

Point to_caller(const MomentSolution& sol, Point t) {
  if (sol.center.empty()) return t;
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = sol.center[j] + sol.half[j] * t[j];
  return t;
}

}  // namespace

std::optional<Point> first_moments(const MomentSolution& sol) {
  const std::size_t n = sol.constraints.n;
  if (n == 0 || sol.moments.size() <= static_cast<Eigen::Index>(n)) return std::nullopt;
  Point t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = sol.moments(static_cast<Eigen::Index>(1 + j));
  return to_caller(sol, std::move(t));
}

std::optional<Point> extract_minimizer(const MomentSolution& sol, const RelaxationOptions& options) {
  if (sol.solver_status != sdp::Status::Optimal || sol.status != BoundStatus::Certified) {
    return std::nullopt;
  }
  const std::size_t n = sol.constraints.n;
  if (sol.moment_matrix.rows() < 2 || sol.moments.size() <= static_cast<Eigen::Index>(n)) {
    return std::nullopt;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sol.moment_matrix, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double l1 = ev(ev.size() - 1), l2 = ev(ev.size() - 2);
  if (!(l1 > 0.0) || l2 / l1 > options.rank_ratio) return std::nullopt;

  Point t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = sol.moments(static_cast<Eigen::Index>(1 + j));
  auto refined = newton_refine(sol.constraints.equalities(), t);
  if (!refined) return std::nullopt;
  for (std::size_t j = 1; j < sol.constraints.e.size(); ++j) {
    const Polynomial& ej = sol.constraints.e[j];
    if (ej.is_zero()) continue;
    if (ej.evaluate(*refined) / ej.max_abs_coefficient() < -options.feasibility_slack) {
      return std::nullopt;
    }
  }
  return to_caller(sol, std::move(*refined));
}

}  // namespace varbox
