#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace varbox {

/// Closed interval with outward rounding: every arithmetic result is widened
/// by one ulp on each side, so the exact real result is always enclosed.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {}  // NOLINT(google-explicit-constructor)
  Interval(double l, double h) : lo(l), hi(h) {}

  bool contains(double v) const { return lo <= v && v <= hi; }
  double width() const { return hi - lo; }
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }

  static Interval widened(double l, double h) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {std::nextafter(l, -inf), std::nextafter(h, inf)};
  }
};

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval::widened(a.lo + b.lo, a.hi + b.hi);
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval::widened(a.lo - b.hi, a.hi - b.lo);
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return Interval::widened(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
}

/// Integer power; even powers of an interval straddling zero start at zero.
inline Interval pow(const Interval& a, unsigned k) {
  if (k == 0) return Interval(1.0);
  Interval r = a;
  for (unsigned i = 1; i < k; ++i) r = r * a;
  if (k % 2 == 0) {
    const double lo = (a.lo <= 0.0 && a.hi >= 0.0) ? 0.0 : std::max(r.lo, 0.0);
    r.lo = lo;
  }
  return r;
}

}  // namespace varbox
