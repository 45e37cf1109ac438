#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "varbox/interval.hpp"

namespace varbox {

using Point = std::vector<double>;

/// Axis-aligned box [l_1,u_1] x ... x [l_n,u_n].
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> sides);
  Box(std::span<const double> lower, std::span<const double> upper);
  /// [lo, hi]^n
  static Box cube(std::size_t n, double lo, double hi);

  std::size_t dimension() const { return sides_.size(); }
  const Interval& operator[](std::size_t i) const { return sides_[i]; }
  const std::vector<Interval>& sides() const { return sides_; }

  double lower(std::size_t i) const { return sides_[i].lo; }
  double upper(std::size_t i) const { return sides_[i].hi; }
  double width(std::size_t i) const { return sides_[i].width(); }
  double longest_side() const;
  std::size_t longest_dimension() const;
  double diameter() const;
  Point center() const;
  Point half_widths() const;

  bool contains(std::span<const double> p, double inflation = 0.0) const;
  bool contains(const Box& other) const;
  /// Euclidean distance from p to the box (0 inside).
  double distance(std::span<const double> p) const;
  bool intersects(const Box& other, double tol = 0.0) const;

  Box with_side(std::size_t i, Interval side) const;
  Box inflated(double amount) const;
  Box hull(const Box& other) const;
  /// Prepend a degenerate side [value, value] at position `at`.
  Box lifted(std::size_t at, double value) const;
  /// Drop dimension `at`.
  Box dropped(std::size_t at) const;

  std::string to_string() const;

  friend bool operator==(const Box& a, const Box& b);
  /// Lexicographic on (l_1, u_1, l_2, u_2, ...).
  friend bool operator<(const Box& a, const Box& b);

 private:
  std::vector<Interval> sides_;
};

}  // namespace varbox
