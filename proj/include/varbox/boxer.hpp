#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "varbox/box.hpp"
#include "varbox/lasserre.hpp"
#include "varbox/system.hpp"

namespace varbox {

struct EnclosureConfig {
  /// Finalize a box once its longest side is at most this.
  double resolution = 0.1;
  /// Relaxation degree; must cover every generator degree.
  unsigned degree = 4;
  int max_sweeps = 3;
  /// Another sweep runs only if some side shrank by more than this fraction.
  double improvement = 0.05;
  /// Defaults to 1e-9 times the diameter of the initial box.
  std::optional<double> adjacency_tolerance;
  double min_width = 1e-7;
  std::size_t budget = 1'000'000;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  RelaxationOptions relaxation;

  void validate() const;
  double adjacency_tol_for(const Box& initial) const;
};

enum class ShrinkKind { Empty, Shrunk };

struct ShrinkOutcome {
  ShrinkKind kind = ShrinkKind::Shrunk;
  Box box;
  /// Minimizer recovered for each dimension, when the moment matrix allowed it.
  std::vector<std::optional<Point>> witness;
};

using Edge = std::pair<std::size_t, std::size_t>;

struct BoxGraph {
  std::vector<Box> boxes;
  std::vector<Edge> edges;
  std::vector<std::size_t> components;
  std::size_t component_count = 0;
  /// True when the box budget ran out; the boxes still cover Z but some are
  /// coarser than the resolution.
  bool incomplete = false;
  std::size_t processed = 0;
};

ShrinkOutcome shrink(const Box& b, const SemialgebraicSystem& sys, const EnclosureConfig& cfg);

/// Halves b along its longest side, or cuts at the witness coordinate when
/// that lies in the central 80% of the side.
std::pair<Box, Box> split(const Box& b, const std::optional<Point>& witness = std::nullopt);

BoxGraph enclose(const SemialgebraicSystem& sys, const Box& initial, const EnclosureConfig& cfg);

/// Pairs (i, j), i < j, whose closed boxes overlap in every dimension up to tol.
std::vector<Edge> adjacency(const std::vector<Box>& boxes, double tol);

/// Sorts the boxes, then fills in edges and components.
BoxGraph make_graph(std::vector<Box> boxes, double tol);

/// Components of an explicit edge list; ids are numbered by first appearance.
std::vector<std::size_t> connected_components(std::size_t count, const std::vector<Edge>& edges,
                                              std::size_t* component_count = nullptr);

}  // namespace varbox
