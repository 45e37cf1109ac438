#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "varbox/boxer.hpp"
#include "varbox/poly.hpp"

namespace varbox {

struct SkeletonProblem {
  Polynomial g;
  double epsilon = 0.01;
  Box box;
  EnclosureConfig config;

  void validate() const;
};

/// {g - eps, dg/dx_3, ..., dg/dx_n}; just {g - eps} for n <= 2.
SemialgebraicSystem skeleton_system(const Polynomial& g, double epsilon);

BoxGraph build_skeleton(const SkeletonProblem& sp);

struct CriticalBox {
  Box box;
  /// Newton-refined point on {skeleton equations, dg/dx_2 = 0}, if found.
  std::optional<Point> point;
};

/// Encloses the skeleton system plus dg/dx_2 = 0 inside each skeleton box,
/// merges touching pieces and sorts the result by x_1. One warning listing
/// the x_1 widths is appended to `warnings` when it is given.
std::vector<CriticalBox> find_critical_boxes(const BoxGraph& skeleton, const SkeletonProblem& sp,
                                             std::vector<std::string>* warnings = nullptr);

struct SliceSkeleton {
  double value = 0.0;
  /// Boxes in the full space, with x_1 pinned to `value`.
  BoxGraph graph;
};

/// Roadmap of {g = eps} restricted to x_1 = value, lifted back to n dimensions.
/// Slices of dimension >= 3 get their own skeleton, critical boxes and slices.
SliceSkeleton slice_roadmap(const SkeletonProblem& sp, double value);

/// Slices at both ends of each critical box's x_1 interval.
std::vector<SliceSkeleton> recurse_slices(const SkeletonProblem& sp,
                                          const std::vector<CriticalBox>& critical);

/// Union of all boxes with adjacency recomputed over the union.
BoxGraph assemble(const BoxGraph& skeleton, const std::vector<CriticalBox>& critical,
                  const std::vector<SliceSkeleton>& slices, double tol);

struct LinkResult {
  BoxGraph graph;
  /// Box holding p, or the closest one.
  std::size_t box_index = 0;
  bool added_slice = false;
};

/// Largest |g(p) - eps| accepted for a query point.
double link_tolerance(const SkeletonProblem& sp);

/// Joins p to the roadmap through the slice x_1 = p_1. Throws when p is not
/// on the variety within link_tolerance() or lies outside the box.
LinkResult link_point(const Point& p, const BoxGraph& roadmap, const SkeletonProblem& sp);

/// Index of the box holding p (lowest index wins), else the nearest box.
std::optional<std::size_t> locate(const BoxGraph& graph, const Point& p, double tol);

/// Breadth-first path of box indices; ties go to the lowest index.
std::optional<std::vector<std::size_t>> query_path(const BoxGraph& graph, std::size_t from,
                                                   std::size_t to);

enum class QueryStatus { Connected, Disconnected, Unresolved };

std::string to_string(QueryStatus s);

struct RoadmapResult {
  BoxGraph skeleton;
  std::vector<CriticalBox> critical_boxes;
  std::vector<SliceSkeleton> slice_skeletons;
  BoxGraph combined;
  QueryStatus query_status = QueryStatus::Unresolved;
  std::vector<std::size_t> path;
  std::size_t recursions = 0;
  bool incomplete = false;
  std::vector<std::string> warnings;
};

/// Skeleton, every critical box and every slice, assembled.
RoadmapResult build_roadmap(const SkeletonProblem& sp);

/// Skeleton plus links first; critical boxes are then processed in x_1 order
/// until the query is answered.
RoadmapResult lazy_plan(const SkeletonProblem& sp, const Point& start, const Point& goal);

}  // namespace varbox
