#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varbox/boxer.hpp"
#include "varbox/roadmap.hpp"

namespace varbox {

/// Problem description as read from a JSON problem file.
struct ProblemFile {
  std::vector<std::string> vars;
  std::vector<std::string> equalities;
  std::vector<std::string> inequalities;
  /// Expression for g in skeleton and roadmap runs.
  std::optional<std::string> variety;
  Box box;
  double resolution = 0.1;
  unsigned degree = 4;
  std::optional<double> epsilon;
  std::optional<Point> start;
  std::optional<Point> goal;
  std::optional<std::size_t> budget;
  std::optional<double> adjacency_tolerance;

  /// Throws varbox::Error (or ParseError, with the field name prepended) on bad input.
  void validate() const;
  SemialgebraicSystem system() const;
  /// The variety if given, else the single equality, else the sum of squares
  /// of the equalities.
  Polynomial g() const;
  /// epsilon if given, else resolution / 10.
  double epsilon_or_default() const;
};

ProblemFile read_problem(std::istream& in);
ProblemFile load_problem(const std::string& path);

/// Everything a run produces. Box indices in edges, path and slices refer to `boxes`.
struct ResultFile {
  std::string mode;
  std::vector<std::string> vars;
  std::vector<Box> boxes;
  std::vector<Edge> edges;
  std::vector<std::size_t> components;
  std::size_t component_count = 0;
  bool incomplete = false;
  std::vector<Box> critical_boxes;
  struct Slice {
    double value = 0.0;
    std::size_t box_count = 0;
    std::size_t component_count = 0;
  };
  std::vector<Slice> slices;
  std::vector<std::size_t> path;
  std::optional<std::string> query_status;
  std::vector<std::string> warnings;
  /// Free-form run metadata: wall times, SDP count, configuration echo.
  std::string metadata_json = "{}";

  BoxGraph graph() const;
};

ResultFile make_result(const std::string& mode, const std::vector<std::string>& vars,
                       const BoxGraph& graph);
void write_result(std::ostream& out, const ResultFile& r);
ResultFile read_result(std::istream& in);
void save_result(const std::string& path, const ResultFile& r);
ResultFile load_result(const std::string& path);

/// One box per row: l1,u1,...,ln,un,component at 17 significant digits.
void write_boxes_csv(std::ostream& out, const ResultFile& r);
/// Boxes and component ids back from write_boxes_csv output.
std::vector<std::pair<Box, std::size_t>> read_boxes_csv(std::istream& in);
/// Wireframe: 8 vertices and 12 segments per box in 3-D, rectangles at z = 0
/// in 2-D, segments on the x axis in 1-D. Higher dimensions use x1..x3.
void write_boxes_obj(std::ostream& out, const ResultFile& r);

}  // namespace varbox
