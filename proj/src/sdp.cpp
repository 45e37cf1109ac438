#include "varbox/sdp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>

#include "varbox/error.hpp"

namespace varbox::sdp {

namespace {

std::atomic<std::uint64_t> g_solve_count{0};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  int r, c;
  double v;
};

// One constraint's restriction to one block.
struct Term {
  int constraint;
  std::vector<Entry> entries;  // r <= c
  Matrix full;                 // dense copy, used when the block is dense enough
  bool dense = false;
};

// Sparse view of the constraint matrices, grouped by block.
struct SparseProgram {
  int m = 0;
  std::vector<int> sizes;
  std::vector<std::vector<Term>> by_block;
  Vector rhs;
  BlockMatrix c;
  int total_dim = 0;

  explicit SparseProgram(const BlockSDP& prog) {
    m = static_cast<int>(prog.constraints.size());
    sizes = prog.block_sizes;
    by_block.resize(sizes.size());
    rhs.resize(m);
    c = prog.objective;
    for (int s : sizes) total_dim += s;
    for (int i = 0; i < m; ++i) {
      rhs(i) = prog.constraints[i].rhs;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        const Matrix& a = prog.constraints[i].a.blocks[k];
        Term t;
        t.constraint = i;
        for (int col = 0; col < a.cols(); ++col) {
          for (int row = 0; row <= col; ++row) {
            if (a(row, col) != 0.0) t.entries.push_back({row, col, a(row, col)});
          }
        }
        if (t.entries.empty()) continue;
        t.dense = 2 * static_cast<int>(t.entries.size()) > sizes[k];
        if (t.dense) t.full = a;
        by_block[k].push_back(std::move(t));
      }
    }
  }

  static double term_dot(const Term& t, const Matrix& x) {
    double s = 0.0;
    for (const auto& e : t.entries) s += (e.r == e.c ? 1.0 : 2.0) * e.v * x(e.r, e.c);
    return s;
  }

  // A(X)
  Vector apply(const BlockMatrix& x) const {
    Vector out = Vector::Zero(m);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      for (const auto& t : by_block[k]) out(t.constraint) += term_dot(t, x.blocks[k]);
    }
    return out;
  }

  // sum_i y_i A_i
  BlockMatrix adjoint(const Vector& y) const {
    BlockMatrix out = BlockMatrix::zeros(sizes);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      Matrix& b = out.blocks[k];
      for (const auto& t : by_block[k]) {
        const double w = y(t.constraint);
        if (w == 0.0) continue;
        for (const auto& e : t.entries) {
          b(e.r, e.c) += w * e.v;
          if (e.r != e.c) b(e.c, e.r) += w * e.v;
        }
      }
    }
    return out;
  }
};

BlockMatrix add(const BlockMatrix& a, const BlockMatrix& b, double beta = 1.0) {
  BlockMatrix out = a;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] += beta * b.blocks[k];
  return out;
}

double frobenius(const BlockMatrix& a) {
  double s = 0.0;
  for (const auto& b : a.blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

void symmetrize(BlockMatrix& a) {
  for (auto& b : a.blocks) b = 0.5 * (b + b.transpose()).eval();
}

bool all_finite(const BlockMatrix& a) {
  for (const auto& b : a.blocks) {
    if (!b.allFinite()) return false;
  }
  return true;
}

// Nesterov-Todd scaling of one block: W = G G^T with G^{-1} X G^{-T} = G^T S G = diag(lambda).
struct Scaling {
  Matrix g, g_inv, w, chol_x, chol_s;
  Vector lambda;
};

bool nt_scaling(const Matrix& x, const Matrix& s, Scaling& out) {
  Eigen::LLT<Matrix> lx(x), ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  out.chol_x = lx.matrixL();
  out.chol_s = ls.matrixL();
  Matrix prod = out.chol_s.transpose() * out.chol_x;
  Eigen::JacobiSVD<Matrix> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.lambda = svd.singularValues();
  if (out.lambda.minCoeff() <= 0.0 || !out.lambda.allFinite()) return false;
  const Vector root = out.lambda.cwiseSqrt();
  const Vector inv_root = root.cwiseInverse();
  out.g = out.chol_x * svd.matrixV() * inv_root.asDiagonal();
  // G^{-1} = diag(sqrt(lambda)) V^T L_X^{-1}
  Matrix lx_inv = out.chol_x.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(x.rows(), x.cols()));
  out.g_inv = root.asDiagonal() * svd.matrixV().transpose() * lx_inv;
  out.w = out.g * out.g.transpose();
  return true;
}

// Largest alpha with L L^T + alpha D still PSD, given the Cholesky factor L.
double max_step(const Matrix& chol, const Matrix& d) {
  if (d.rows() == 1) {
    const double l2 = chol(0, 0) * chol(0, 0);
    return d(0, 0) < 0.0 ? -l2 / d(0, 0) : kInf;
  }
  auto lower = chol.triangularView<Eigen::Lower>();
  Matrix b = lower.solve(d);
  b = lower.solve(b.transpose()).transpose().eval();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

class Solver {
 public:
  Solver(const BlockSDP& prog, const SolverOptions& opt) : p_(prog), opt_(opt) {}

  SDPSolution run() {
    const int nb = static_cast<int>(p_.sizes.size());
    double scale0 = std::max(p_.c.max_abs(), p_.rhs.size() ? p_.rhs.cwiseAbs().maxCoeff() : 0.0);
    for (const auto& terms : p_.by_block) {
      for (const auto& t : terms) {
        for (const auto& e : t.entries) scale0 = std::max(scale0, std::abs(e.v));
      }
    }
    scale0 += 1.0;

    BlockMatrix x = BlockMatrix::identity(p_.sizes, scale0);
    BlockMatrix s = BlockMatrix::identity(p_.sizes, scale0);
    Vector y = Vector::Zero(p_.m);

    const double norm_a = p_.rhs.norm();
    const double norm_c = frobenius(p_.c);
    SDPSolution sol;
    int stalls = 0;

    for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
      sol.iterations = iter;
      const double pobj = p_.c.dot(x);
      const double dobj = p_.rhs.dot(y);
      const Vector rp = p_.rhs - p_.apply(x);
      BlockMatrix rd = add(add(p_.adjoint(y), s, -1.0), p_.c, -1.0);  // A*y - S - C
      const double pinf = rp.norm() / (1.0 + norm_a);
      const double dinf = frobenius(rd) / (1.0 + norm_c);
      const double compl_gap = x.dot(s);
      const double scale = 1.0 + std::abs(pobj);

      sol.X = x;
      sol.y = y;
      sol.S = s;
      sol.primal_objective = pobj;
      sol.dual_objective = dobj;
      sol.primal_infeasibility = pinf;
      sol.dual_infeasibility = dinf;

      if (!std::isfinite(pobj) || !std::isfinite(dobj) || !all_finite(x) || !all_finite(s)) {
        sol.status = Status::NumericalLimit;
        return sol;
      }
      if (pinf <= opt_.tol && dinf <= opt_.tol && std::abs(pobj - dobj) <= opt_.tol * scale &&
          compl_gap <= opt_.tol * scale) {
        sol.status = Status::Optimal;
        return sol;
      }
      if (iter > 0 && primal_infeasible_ray(y, dobj, sol)) return sol;
      if (iter > 0 && dual_infeasible_ray(x, pobj, sol)) return sol;
      if (iter == opt_.max_iterations) break;

      // scaling and Schur complement
      std::vector<Scaling> sc(nb);
      for (int k = 0; k < nb; ++k) {
        if (!nt_scaling(x.blocks[k], s.blocks[k], sc[k])) {
          sol.status = Status::NumericalLimit;
          return sol;
        }
      }
      Matrix schur = Matrix::Zero(p_.m, p_.m);
      build_schur(sc, schur);
      Eigen::LLT<Matrix> schur_llt(schur);
      if (schur_llt.info() != Eigen::Success) {
        // rank-deficient constraint set: regularize lightly
        const double reg = 1e-14 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
        schur.diagonal().array() += reg;
        schur_llt.compute(schur);
        if (schur_llt.info() != Eigen::Success) {
          sol.status = Status::NumericalLimit;
          return sol;
        }
      }

      const double mu = compl_gap / p_.total_dim;

      // predictor
      std::vector<Matrix> corr;  // empty
      BlockMatrix dx, ds;
      Vector dy;
      direction(sc, schur_llt, rp, rd, 0.0, corr, dx, dy, ds);
      double ap = std::min(1.0, primal_step(sc, dx));
      double ad = std::min(1.0, dual_step(sc, ds));
      const double mu_aff =
          add(x, dx, ap).dot(add(s, ds, ad)) / static_cast<double>(p_.total_dim);
      double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
      sigma = std::clamp(sigma, 0.0, 1.0);

      // corrector
      corr.resize(nb);
      for (int k = 0; k < nb; ++k) {
        const Matrix dxt = sc[k].g_inv * dx.blocks[k] * sc[k].g_inv.transpose();
        const Matrix dst = sc[k].g.transpose() * ds.blocks[k] * sc[k].g;
        corr[k] = dxt * dst + dst * dxt;
      }
      direction(sc, schur_llt, rp, rd, sigma * mu, corr, dx, dy, ds);
      ap = std::min(1.0, opt_.step_fraction * primal_step(sc, dx));
      ad = std::min(1.0, opt_.step_fraction * dual_step(sc, ds));
      if (!std::isfinite(ap) || !std::isfinite(ad)) {
        sol.status = Status::NumericalLimit;
        return sol;
      }
      stalls = (ap < 1e-9 && ad < 1e-9) ? stalls + 1 : 0;
      if (stalls >= 3) {
        sol.status = Status::NumericalLimit;
        return sol;
      }

      x = add(x, dx, ap);
      y += ad * dy;
      s = add(s, ds, ad);
      symmetrize(x);
      symmetrize(s);
    }
    sol.status = Status::NumericalLimit;
    return sol;
  }

 private:
  void build_schur(const std::vector<Scaling>& sc, Matrix& schur) const {
    for (std::size_t k = 0; k < p_.sizes.size(); ++k) {
      const auto& terms = p_.by_block[k];
      const Matrix& w = sc[k].w;
      const int n = p_.sizes[k];
      Matrix t(n, n);
      for (std::size_t a = 0; a < terms.size(); ++a) {
        const Term& ta = terms[a];
        if (ta.dense) {
          t.noalias() = w * ta.full * w;
        } else {
          t.setZero();
          for (const auto& e : ta.entries) {
            t.noalias() += e.v * w.col(e.r) * w.row(e.c);
            if (e.r != e.c) t.noalias() += e.v * w.col(e.c) * w.row(e.r);
          }
        }
        for (std::size_t b = a; b < terms.size(); ++b) {
          const double v = SparseProgram::term_dot(terms[b], t);
          schur(ta.constraint, terms[b].constraint) += v;
          if (b != a) schur(terms[b].constraint, ta.constraint) += v;
        }
      }
    }
  }

  // Solves for (dX, dy, dS) with dX + W dS W = G D G^T, where D is built from the
  // target sigma_mu and the second-order correction (empty for the predictor).
  void direction(const std::vector<Scaling>& sc, const Eigen::LLT<Matrix>& schur,
                 const Vector& rp, const BlockMatrix& rd, double sigma_mu,
                 const std::vector<Matrix>& corr, BlockMatrix& dx, Vector& dy,
                 BlockMatrix& ds) const {
    const std::size_t nb = p_.sizes.size();
    BlockMatrix r = BlockMatrix::zeros(p_.sizes);
    for (std::size_t k = 0; k < nb; ++k) {
      const Vector& lam = sc[k].lambda;
      const int n = p_.sizes[k];
      Matrix d(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double rhs = (i == j) ? 2.0 * (sigma_mu - lam(i) * lam(i)) : 0.0;
          if (!corr.empty()) rhs -= corr[k](i, j);
          d(i, j) = rhs / (lam(i) + lam(j));
        }
      }
      r.blocks[k] = sc[k].g * d * sc[k].g.transpose();
    }
    BlockMatrix wrdw = BlockMatrix::zeros(p_.sizes);
    for (std::size_t k = 0; k < nb; ++k) wrdw.blocks[k] = sc[k].w * rd.blocks[k] * sc[k].w;
    const Vector h = p_.apply(add(r, wrdw, -1.0)) - rp;
    dy = schur.solve(h);
    ds = add(p_.adjoint(dy), rd);
    dx = r;
    for (std::size_t k = 0; k < nb; ++k) dx.blocks[k] -= sc[k].w * ds.blocks[k] * sc[k].w;
    symmetrize(dx);
    symmetrize(ds);
  }

  double primal_step(const std::vector<Scaling>& sc, const BlockMatrix& dx) const {
    double a = kInf;
    for (std::size_t k = 0; k < sc.size(); ++k) a = std::min(a, max_step(sc[k].chol_x, dx.blocks[k]));
    return a;
  }

  double dual_step(const std::vector<Scaling>& sc, const BlockMatrix& ds) const {
    double a = kInf;
    for (std::size_t k = 0; k < sc.size(); ++k) a = std::min(a, max_step(sc[k].chol_s, ds.blocks[k]));
    return a;
  }

  // Farkas test: a^T y < 0 with sum y_i A_i PSD (to within tol) proves no feasible X.
  bool primal_infeasible_ray(const Vector& y, double dobj, SDPSolution& sol) const {
    if (!(dobj < 0.0) || y.norm() == 0.0) return false;
    const Vector ray = y / (-dobj);
    const BlockMatrix z = p_.adjoint(ray);
    for (const auto& b : z.blocks) {
      if (min_eigenvalue(b) < -opt_.tol) return false;
    }
    sol.status = Status::PrimalInfeasible;
    sol.y = ray;
    return true;
  }

  // Improving ray: X PSD with A(X) ~ 0 and tr(CX) > 0 proves the dual infeasible.
  bool dual_infeasible_ray(const BlockMatrix& x, double pobj, SDPSolution& sol) const {
    if (!(pobj > 0.0)) return false;
    BlockMatrix ray = x;
    for (auto& b : ray.blocks) b /= pobj;
    const Vector ax = p_.apply(ray);
    if (ax.lpNorm<Eigen::Infinity>() > opt_.tol) return false;
    for (const auto& b : ray.blocks) {
      if (min_eigenvalue(b) < 0.0) return false;
    }
    sol.status = Status::DualInfeasible;
    sol.X = std::move(ray);
    return true;
  }

  SparseProgram p_;
  SolverOptions opt_;
};

}  // namespace

BlockMatrix BlockMatrix::zeros(const std::vector<int>& sizes) {
  BlockMatrix b;
  b.blocks.reserve(sizes.size());
  for (int s : sizes) b.blocks.push_back(Matrix::Zero(s, s));
  return b;
}

BlockMatrix BlockMatrix::identity(const std::vector<int>& sizes, double scale) {
  BlockMatrix b;
  b.blocks.reserve(sizes.size());
  for (int s : sizes) b.blocks.push_back(scale * Matrix::Identity(s, s));
  return b;
}

double BlockMatrix::dot(const BlockMatrix& other) const {
  double s = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) s += blocks[k].cwiseProduct(other.blocks[k]).sum();
  return s;
}

double BlockMatrix::trace() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.trace();
  return s;
}

double BlockMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks) {
    if (b.size()) m = std::max(m, b.cwiseAbs().maxCoeff());
  }
  return m;
}

void BlockSDP::validate() const {
  if (block_sizes.empty()) throw Error("SDP has no blocks");
  for (int s : block_sizes) {
    if (s <= 0) throw Error("SDP block sizes must be positive");
  }
  if (constraints.empty()) throw Error("SDP needs at least one constraint");
  auto check = [&](const BlockMatrix& m, const std::string& what) {
    if (m.blocks.size() != block_sizes.size()) {
      throw Error(what + " has " + std::to_string(m.blocks.size()) + " blocks, expected " +
                  std::to_string(block_sizes.size()));
    }
    for (std::size_t k = 0; k < block_sizes.size(); ++k) {
      const Matrix& b = m.blocks[k];
      if (b.rows() != block_sizes[k] || b.cols() != block_sizes[k]) {
        throw Error(what + " block " + std::to_string(k) + " has wrong size");
      }
      if (!b.allFinite()) throw Error(what + " block " + std::to_string(k) + " is not finite");
      const double tol = 1e-12 * (1.0 + b.cwiseAbs().maxCoeff());
      if ((b - b.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw Error(what + " block " + std::to_string(k) + " is not symmetric");
      }
    }
  };
  check(objective, "objective");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    check(constraints[i].a, "constraint " + std::to_string(i));
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::PrimalInfeasible: return "PrimalInfeasible";
    case Status::DualInfeasible: return "DualInfeasible";
    case Status::NumericalLimit: return "NumericalLimit";
  }
  return "?";
}

SDPSolution solve(const BlockSDP& prog, double tol) {
  SolverOptions o;
  o.tol = tol;
  return solve(prog, o);
}

SDPSolution solve(const BlockSDP& prog, const SolverOptions& options) {
  prog.validate();
  if (!(options.tol > 0.0)) throw Error("solver tolerance must be positive");
  g_solve_count.fetch_add(1, std::memory_order_relaxed);
  SDPSolution sol = Solver(prog, options).run();
  if (sol.status == Status::Optimal) sol.certified_dual_bound = certify_dual_bound(prog, sol.y);
  return sol;
}

double default_margin(const BlockSDP& prog) {
  double nuclear = 0.0;
  for (const auto& b : prog.objective.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    nuclear += es.eigenvalues().cwiseAbs().sum();
  }
  return std::max(1e-9 * nuclear, 1e-12);
}

bool verify_psd(const Matrix& m, double shift) {
  Matrix a = 0.5 * (m + m.transpose());
  a.diagonal().array() += shift;
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) return false;
  return (ldlt.vectorD().array() > 0.0).all();
}

std::optional<double> certify_dual_bound(const BlockSDP& prog, const Vector& y,
                                         std::optional<double> margin) {
  if (static_cast<std::size_t>(y.size()) != prog.constraints.size()) {
    throw DimensionError("dual vector has " + std::to_string(y.size()) + " entries, program has " +
                         std::to_string(prog.constraints.size()) + " constraints");
  }
  const double shift = margin.value_or(default_margin(prog));
  double bound = 0.0;
  for (std::size_t i = 0; i < prog.constraints.size(); ++i) bound += prog.constraints[i].rhs * y(i);
  for (std::size_t k = 0; k < prog.block_sizes.size(); ++k) {
    Matrix slack = -prog.objective.blocks[k];
    for (std::size_t i = 0; i < prog.constraints.size(); ++i) {
      if (y(i) != 0.0) slack += y(i) * prog.constraints[i].a.blocks[k];
    }
    if (!verify_psd(slack, shift)) return std::nullopt;
  }
  return bound;
}

void write_sparse(std::ostream& os, const BlockSDP& prog) {
  const auto prec = os.precision(17);
  os << prog.constraints.size() << "\n" << prog.block_sizes.size() << "\n";
  for (std::size_t k = 0; k < prog.block_sizes.size(); ++k) {
    os << (k ? " " : "") << prog.block_sizes[k];
  }
  os << "\n";
  for (std::size_t i = 0; i < prog.constraints.size(); ++i) {
    os << (i ? " " : "") << prog.constraints[i].rhs;
  }
  os << "\n";
  auto dump = [&](std::size_t index, const BlockMatrix& m) {
    for (std::size_t k = 0; k < m.blocks.size(); ++k) {
      const Matrix& b = m.blocks[k];
      for (int c = 0; c < b.cols(); ++c) {
        for (int r = 0; r <= c; ++r) {
          if (b(r, c) != 0.0) {
            os << index << " " << k + 1 << " " << r + 1 << " " << c + 1 << " " << b(r, c) << "\n";
          }
        }
      }
    }
  };
  dump(0, prog.objective);
  for (std::size_t i = 0; i < prog.constraints.size(); ++i) dump(i + 1, prog.constraints[i].a);
  os.precision(prec);
}

std::uint64_t solve_count() { return g_solve_count.load(std::memory_order_relaxed); }

}  // namespace varbox::sdp
