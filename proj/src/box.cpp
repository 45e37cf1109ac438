#include "varbox/box.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varbox/error.hpp"
#include "varbox/system.hpp"

namespace varbox {

Box::Box(std::vector<Interval> sides) : sides_(std::move(sides)) {
  for (const auto& s : sides_) {
    if (!(s.lo <= s.hi)) throw Error("box side has lower bound above upper bound");
  }
}

Box::Box(std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != upper.size()) throw DimensionError("box bound vectors differ in length");
  sides_.reserve(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw Error("box side has lower bound above upper bound");
    sides_.emplace_back(lower[i], upper[i]);
  }
}

Box Box::cube(std::size_t n, double lo, double hi) {
  return Box(std::vector<Interval>(n, Interval(lo, hi)));
}

double Box::longest_side() const {
  double m = 0.0;
  for (const auto& s : sides_) m = std::max(m, s.width());
  return m;
}

std::size_t Box::longest_dimension() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sides_.size(); ++i) {
    if (sides_[i].width() > sides_[best].width()) best = i;
  }
  return best;
}

double Box::diameter() const {
  double s = 0.0;
  for (const auto& side : sides_) s += side.width() * side.width();
  return std::sqrt(s);
}

Point Box::center() const {
  Point c(sides_.size());
  for (std::size_t i = 0; i < sides_.size(); ++i) c[i] = 0.5 * (sides_[i].lo + sides_[i].hi);
  return c;
}

Point Box::half_widths() const {
  Point h(sides_.size());
  for (std::size_t i = 0; i < sides_.size(); ++i) h[i] = 0.5 * (sides_[i].hi - sides_[i].lo);
  return h;
}

bool Box::contains(std::span<const double> p, double inflation) const {
  if (p.size() != sides_.size()) throw DimensionError("point/box dimension mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < sides_[i].lo - inflation || p[i] > sides_[i].hi + inflation) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (other.sides_[i].lo < sides_[i].lo || other.sides_[i].hi > sides_[i].hi) return false;
  }
  return true;
}

double Box::distance(std::span<const double> p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = 0.0;
    if (p[i] < sides_[i].lo) d = sides_[i].lo - p[i];
    if (p[i] > sides_[i].hi) d = p[i] - sides_[i].hi;
    s += d * d;
  }
  return std::sqrt(s);
}

bool Box::intersects(const Box& other, double tol) const {
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (sides_[i].lo > other.sides_[i].hi + tol) return false;
    if (other.sides_[i].lo > sides_[i].hi + tol) return false;
  }
  return true;
}

Box Box::with_side(std::size_t i, Interval side) const {
  Box b = *this;
  b.sides_[i] = side;
  return b;
}

Box Box::inflated(double amount) const {
  Box b = *this;
  for (auto& s : b.sides_) {
    s.lo -= amount;
    s.hi += amount;
  }
  return b;
}

Box Box::hull(const Box& other) const {
  Box b = *this;
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    b.sides_[i].lo = std::min(sides_[i].lo, other.sides_[i].lo);
    b.sides_[i].hi = std::max(sides_[i].hi, other.sides_[i].hi);
  }
  return b;
}

Box Box::lifted(std::size_t at, double value) const {
  std::vector<Interval> s = sides_;
  s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), Interval(value, value));
  return Box(std::move(s));
}

Box Box::dropped(std::size_t at) const {
  std::vector<Interval> s = sides_;
  s.erase(s.begin() + static_cast<std::ptrdiff_t>(at));
  return Box(std::move(s));
}

std::string Box::to_string() const {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (i) os << " x ";
    os << "[" << sides_[i].lo << ", " << sides_[i].hi << "]";
  }
  return os.str();
}

bool operator==(const Box& a, const Box& b) {
  if (a.dimension() != b.dimension()) return false;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi) return false;
  }
  return true;
}

bool operator<(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < std::min(a.dimension(), b.dimension()); ++i) {
    if (a[i].lo != b[i].lo) return a[i].lo < b[i].lo;
    if (a[i].hi != b[i].hi) return a[i].hi < b[i].hi;
  }
  return a.dimension() < b.dimension();
}

// ---------------------------------------------------------------------------

SemialgebraicSystem::SemialgebraicSystem(std::size_t dim, std::vector<Polynomial> eqs,
                                         std::vector<Polynomial> ineqs)
    : n(dim), equalities(std::move(eqs)), inequalities(std::move(ineqs)) {
  validate();
}

void SemialgebraicSystem::validate() const {
  for (const auto& p : equalities) {
    if (p.dimension() != n) throw DimensionError("equality polynomial has wrong dimension");
  }
  for (const auto& p : inequalities) {
    if (p.dimension() != n) throw DimensionError("inequality polynomial has wrong dimension");
  }
}

unsigned SemialgebraicSystem::max_degree() const {
  unsigned d = 0;
  for (const auto& p : equalities) d = std::max(d, p.degree());
  for (const auto& p : inequalities) d = std::max(d, p.degree());
  return d;
}

bool SemialgebraicSystem::satisfied(std::span<const double> x, double eq_tol,
                                    double ineq_tol) const {
  for (const auto& h : equalities) {
    if (std::abs(h.evaluate(x)) > eq_tol) return false;
  }
  for (const auto& f : inequalities) {
    if (f.evaluate(x) < -ineq_tol) return false;
  }
  return true;
}

SemialgebraicSystem SemialgebraicSystem::affine_substitute(
    std::span<const double> center, std::span<const double> half) const {
  SemialgebraicSystem s;
  s.n = n;
  for (const auto& h : equalities) s.equalities.push_back(h.affine_substitute(center, half));
  for (const auto& f : inequalities) s.inequalities.push_back(f.affine_substitute(center, half));
  return s;
}

}  // namespace varbox
