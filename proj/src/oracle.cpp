#include "varbox/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>

#include "varbox/error.hpp"

namespace varbox {

Interval interval_evaluate(const Polynomial& p, const Box& b) {
  if (p.dimension() != b.dimension()) throw DimensionError("polynomial/box dimension mismatch");
  Interval sum(0.0);
  for (const auto& [e, c] : p.terms()) {
    Interval t(c);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j]) t = t * pow(b[j], e[j]);
    }
    sum = sum + t;
  }
  return sum;
}

double monomial_sup(const ExponentVector& e, const Box& b) {
  Interval t(1.0);
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j]) t = t * Interval(pow(b[j], e[j]).mag());
  }
  return t.hi;
}

bool interval_feasible(const SemialgebraicSystem& sys, const Box& b) {
  for (const auto& h : sys.equalities) {
    if (!interval_evaluate(h, b).contains(0.0)) return false;
  }
  for (const auto& f : sys.inequalities) {
    if (interval_evaluate(f, b).hi < 0.0) return false;
  }
  return true;
}

namespace {

std::pair<Box, Box> bisect(const Box& b) {
  const std::size_t k = b.longest_dimension();
  const double mid = 0.5 * (b[k].lo + b[k].hi);
  return {b.with_side(k, {b[k].lo, mid}), b.with_side(k, {mid, b[k].hi})};
}

// All 2^n halves of b.
std::vector<Box> split_all(const Box& b) {
  std::vector<Box> out{b};
  for (std::size_t k = 0; k < b.dimension(); ++k) {
    std::vector<Box> next;
    next.reserve(out.size() * 2);
    for (const auto& c : out) {
      const double mid = 0.5 * (c[k].lo + c[k].hi);
      next.push_back(c.with_side(k, {c[k].lo, mid}));
      next.push_back(c.with_side(k, {mid, c[k].hi}));
    }
    out = std::move(next);
  }
  return out;
}

double sq_residual(const std::vector<Polynomial>& eqs, const Point& x) {
  double r = 0.0;
  for (const auto& h : eqs) {
    const double v = h.evaluate(x);
    r += v * v;
  }
  return r;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::vector<Box> pave(const SemialgebraicSystem& sys, const Box& b, double rho,
                      std::size_t budget) {
  if (!(rho > 0.0)) throw Error("paver resolution must be positive");
  if (sys.n != b.dimension()) throw DimensionError("system/box dimension mismatch");
  std::vector<Box> out, stack{b};
  std::size_t visited = 0;
  while (!stack.empty()) {
    Box cur = std::move(stack.back());
    stack.pop_back();
    if (++visited > budget) throw Error("paver box budget exceeded");
    if (!interval_feasible(sys, cur)) continue;
    if (cur.longest_side() <= rho) {
      out.push_back(std::move(cur));
      continue;
    }
    auto [lo, hi] = bisect(cur);
    stack.push_back(std::move(hi));
    stack.push_back(std::move(lo));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Point> newton_refine(const std::vector<Polynomial>& equalities, const Point& seed,
                                   int max_iters, double tol) {
  Point x = seed;
  if (equalities.empty()) return x;
  const std::size_t n = seed.size();
  std::vector<std::vector<Polynomial>> grad(equalities.size());
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    if (equalities[i].dimension() != n) throw DimensionError("equality/seed dimension mismatch");
    for (std::size_t j = 0; j < n; ++j) grad[i].push_back(equalities[i].partial_derivative(j));
  }
  const auto k = static_cast<Eigen::Index>(equalities.size());
  for (int it = 0; it <= max_iters; ++it) {
    Eigen::VectorXd r(k);
    for (Eigen::Index i = 0; i < k; ++i) r(i) = equalities[i].evaluate(x);
    if (!r.allFinite()) return std::nullopt;
    if (r.cwiseAbs().maxCoeff() <= tol) return x;
    if (it == max_iters) break;
    Eigen::MatrixXd jac(k, static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < n; ++j) jac(i, static_cast<Eigen::Index>(j)) = grad[i][j].evaluate(x);
    }
    if (!jac.allFinite() || jac.norm() == 0.0) return std::nullopt;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
    cod.setThreshold(1e-12);
    if (cod.rank() == 0) return std::nullopt;
    Eigen::VectorXd dx = cod.solve(-r);
    if (!dx.allFinite()) return std::nullopt;
    const double f0 = r.squaredNorm();
    double t = 1.0;
    Point trial(n);
    for (;;) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + t * dx(static_cast<Eigen::Index>(j));
      const double f1 = sq_residual(equalities, trial);
      if (f1 < f0 || t < 1e-6) break;
      t *= 0.5;
    }
    if (trial == x) return std::nullopt;
    x = trial;
  }
  return std::nullopt;
}

std::vector<Point> sample_variety(const SemialgebraicSystem& sys, const Box& b, std::size_t count,
                                  const SampleOptions& options) {
  if (count == 0) throw Error("sample count must be positive");
  const std::size_t n = b.dimension();
  if (sys.n != n) throw DimensionError("system/box dimension mismatch");

  std::size_t per_dim = options.grid;
  while (per_dim > 1 && std::pow(static_cast<double>(per_dim), static_cast<double>(n)) >
                            static_cast<double>(options.max_cells)) {
    --per_dim;
  }

  std::vector<Box> cells;
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    std::vector<Interval> sides(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = b.width(j) / static_cast<double>(per_dim);
      const double lo = b.lower(j) + w * static_cast<double>(idx[j]);
      const double hi = idx[j] + 1 == per_dim ? b.upper(j) : lo + w;
      sides[j] = {lo, hi};
    }
    Box cell(std::move(sides));
    if (interval_feasible(sys, cell)) cells.push_back(std::move(cell));
    std::size_t j = 0;
    while (j < n && ++idx[j] == per_dim) idx[j++] = 0;
    if (j == n) break;
  }

  // Refine the kept cells until there are a few seeds per requested point.
  const std::size_t want = 4 * count;
  for (int depth = 0; depth < 8 && !cells.empty() && cells.size() < want; ++depth) {
    std::vector<Box> next;
    for (const auto& c : cells) {
      for (auto& s : split_all(c)) {
        if (interval_feasible(sys, s)) next.push_back(std::move(s));
      }
    }
    cells = std::move(next);
  }
  if (cells.empty()) return {};

  // Thin very large seed sets evenly.
  const std::size_t max_seeds = std::max<std::size_t>(20 * count, 1000);
  std::vector<Point> seeds;
  const std::size_t stride = (cells.size() + max_seeds - 1) / max_seeds;
  for (std::size_t i = 0; i < cells.size(); i += std::max<std::size_t>(stride, 1)) {
    seeds.push_back(cells[i].center());
  }

  std::vector<Point> found;
  for (const auto& s : seeds) {
    auto p = newton_refine(sys.equalities, s, 50, options.residual);
    if (!p || !b.contains(*p)) continue;
    bool ok = true;
    for (const auto& f : sys.inequalities) {
      if (f.evaluate(*p) < -options.inequality_slack) ok = false;
    }
    if (ok) found.push_back(std::move(*p));
  }

  // Merge near-duplicates with a hash grid of cell size `sep`.
  const double sep = options.separation > 0.0 ? options.separation : 1e-6 * b.diameter();
  std::sort(found.begin(), found.end());
  std::map<std::vector<long long>, std::vector<std::size_t>> grid;
  std::vector<Point> unique;
  for (const auto& p : found) {
    std::vector<long long> key(n);
    for (std::size_t j = 0; j < n; ++j) key[j] = static_cast<long long>(std::floor(p[j] / sep));
    bool dup = false;
    std::vector<long long> probe(n);
    const std::size_t neighbours = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(n)));
    for (std::size_t code = 0; code < neighbours && !dup; ++code) {
      std::size_t c = code;
      for (std::size_t j = 0; j < n; ++j) {
        probe[j] = key[j] + static_cast<long long>(c % 3) - 1;
        c /= 3;
      }
      auto it = grid.find(probe);
      if (it == grid.end()) continue;
      for (std::size_t q : it->second) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) d2 += (unique[q][j] - p[j]) * (unique[q][j] - p[j]);
        if (d2 < sep * sep) {
          dup = true;
          break;
        }
      }
    }
    if (dup) continue;
    grid[key].push_back(unique.size());
    unique.push_back(p);
  }

  if (unique.size() <= count) return unique;
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(unique[i * unique.size() / count]);
  return out;
}

CoverageReport verify_enclosure(const std::vector<Point>& points, const std::vector<Box>& boxes,
                                double inflation) {
  if (inflation < 0.0) throw Error("inflation must be non-negative");
  CoverageReport r;
  r.total_samples = points.size();
  for (const auto& p : points) {
    const bool hit = std::any_of(boxes.begin(), boxes.end(),
                                 [&](const Box& b) { return b.contains(p, inflation); });
    if (hit) {
      ++r.covered;
    } else {
      ++r.missed;
      r.missed_points.push_back(p);
    }
  }
  return r;
}

void write_points_csv(std::ostream& os, const std::vector<Point>& points) {
  const auto old = os.precision(17);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.size(); ++j) os << (j ? "," : "") << p[j];
    os << '\n';
  }
  os.precision(old);
}

std::size_t count_components(const std::vector<Box>& boxes, double tol) {
  std::vector<std::size_t> parent(boxes.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (boxes[i].intersects(boxes[j], tol)) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  std::size_t c = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) c += find_root(parent, i) == i;
  return c;
}

}  // namespace varbox
