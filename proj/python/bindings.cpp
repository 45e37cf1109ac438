#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "varbox/boxer.hpp"
#include "varbox/cli.hpp"
#include "varbox/error.hpp"
#include "varbox/lasserre.hpp"
#include "varbox/oracle.hpp"
#include "varbox/problem_io.hpp"
#include "varbox/roadmap.hpp"
#include "varbox/sdp.hpp"

namespace py = pybind11;
using namespace varbox;

namespace {

using Sides = std::vector<std::pair<double, double>>;

Box to_box(const Sides& sides) {
  std::vector<Interval> v;
  for (const auto& [lo, hi] : sides) v.emplace_back(lo, hi);
  return Box(std::move(v));
}

Sides from_box(const Box& b) {
  Sides s;
  for (const auto& side : b.sides()) s.emplace_back(side.lo, side.hi);
  return s;
}

std::vector<Sides> from_boxes(const std::vector<Box>& boxes) {
  std::vector<Sides> out;
  for (const auto& b : boxes) out.push_back(from_box(b));
  return out;
}

SemialgebraicSystem make_system(const std::vector<std::string>& vars, const std::vector<std::string>& eqs,
                                const std::vector<std::string>& ineqs) {
  std::vector<Polynomial> e, i;
  for (const auto& s : eqs) e.push_back(parse_expression(s, vars));
  for (const auto& s : ineqs) i.push_back(parse_expression(s, vars));
  return SemialgebraicSystem(vars.size(), std::move(e), std::move(i));
}

EnclosureConfig make_config(double resolution, unsigned degree, unsigned threads, std::size_t budget) {
  EnclosureConfig c;
  c.resolution = resolution;
  c.degree = degree;
  c.threads = threads;
  c.budget = budget;
  return c;
}

py::dict graph_dict(const BoxGraph& g) {
  py::dict d;
  d["boxes"] = from_boxes(g.boxes);
  d["edges"] = g.edges;
  d["components"] = g.components;
  d["component_count"] = g.component_count;
  d["incomplete"] = g.incomplete;
  return d;
}

SkeletonProblem make_skeleton(const std::vector<std::string>& vars, const std::string& g, const Sides& box,
                              double epsilon, double resolution, unsigned degree, unsigned threads) {
  SkeletonProblem sp;
  sp.g = parse_expression(g, vars);
  sp.epsilon = epsilon;
  sp.box = to_box(box);
  sp.config = make_config(resolution, degree, threads, 1'000'000);
  return sp;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Box enclosures of real algebraic varieties";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  py::class_<Polynomial>(m, "Polynomial")
      .def_property_readonly("dimension", &Polynomial::dimension)
      .def_property_readonly("degree", &Polynomial::degree)
      .def("__call__", [](const Polynomial& p, const std::vector<double>& x) {
        if (x.size() != p.dimension()) throw DimensionError("point has the wrong dimension");
        return p.evaluate(x);
      })
      .def("derivative", &Polynomial::partial_derivative, py::arg("i"))
      .def("to_string", &Polynomial::to_string, py::arg("vars") = std::vector<std::string>{})
      .def("__repr__", [](const Polynomial& p) { return "Polynomial(" + p.to_string() + ")"; })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self == py::self);

  m.def("parse", &parse_expression, py::arg("text"), py::arg("vars"),
        "Parse an expression in the named variables.");

  m.def(
      "enclose",
      [](const std::vector<std::string>& vars, const std::vector<std::string>& equalities, const Sides& box,
         double resolution, unsigned degree, const std::vector<std::string>& inequalities, unsigned threads,
         std::size_t budget) {
        SemialgebraicSystem sys = make_system(vars, equalities, inequalities);
        EnclosureConfig cfg = make_config(resolution, degree, threads, budget);
        BoxGraph g;
        {
          py::gil_scoped_release release;
          g = enclose(sys, to_box(box), cfg);
        }
        return graph_dict(g);
      },
      py::arg("vars"), py::arg("equalities"), py::arg("box"), py::arg("resolution") = 0.1,
      py::arg("degree") = 4, py::arg("inequalities") = std::vector<std::string>{}, py::arg("threads") = 0,
      py::arg("budget") = 1'000'000,
      "Enclose the solutions of the system in boxes; returns the box graph as a dict.");

  m.def(
      "skeleton",
      [](const std::vector<std::string>& vars, const std::string& g, const Sides& box, double epsilon,
         double resolution, unsigned degree, unsigned threads) {
        SkeletonProblem sp = make_skeleton(vars, g, box, epsilon, resolution, degree, threads);
        BoxGraph out;
        {
          py::gil_scoped_release release;
          out = build_skeleton(sp);
        }
        return graph_dict(out);
      },
      py::arg("vars"), py::arg("g"), py::arg("box"), py::arg("epsilon") = 0.01, py::arg("resolution") = 0.1,
      py::arg("degree") = 4, py::arg("threads") = 0);

  m.def(
      "roadmap",
      [](const std::vector<std::string>& vars, const std::string& g, const Sides& box,
         std::optional<Point> start, std::optional<Point> goal, double epsilon, double resolution,
         unsigned degree, unsigned threads) {
        if (start.has_value() != goal.has_value()) throw Error("start and goal must be given together");
        SkeletonProblem sp = make_skeleton(vars, g, box, epsilon, resolution, degree, threads);
        RoadmapResult r;
        {
          py::gil_scoped_release release;
          r = start ? lazy_plan(sp, *start, *goal) : build_roadmap(sp);
        }
        py::dict d = graph_dict(r.combined);
        d["skeleton"] = graph_dict(r.skeleton);
        std::vector<Sides> crit;
        for (const auto& c : r.critical_boxes) crit.push_back(from_box(c.box));
        d["critical_boxes"] = crit;
        std::vector<double> slices;
        for (const auto& s : r.slice_skeletons) slices.push_back(s.value);
        d["slices"] = slices;
        d["recursions"] = r.recursions;
        d["warnings"] = r.warnings;
        if (start) {
          d["query_status"] = to_string(r.query_status);
          d["path"] = r.path;
        }
        return d;
      },
      py::arg("vars"), py::arg("g"), py::arg("box"), py::arg("start") = py::none(),
      py::arg("goal") = py::none(), py::arg("epsilon") = 0.01, py::arg("resolution") = 0.1,
      py::arg("degree") = 4, py::arg("threads") = 0,
      "Full roadmap, or a lazy start/goal query when both points are given.");

  m.def(
      "bound",
      [](const std::vector<std::string>& vars, const std::vector<std::string>& equalities, const Sides& box,
         std::size_t var, bool maximize, unsigned degree) {
        MomentSolution s = bound_in_box(make_system(vars, equalities, {}), to_box(box), degree, var,
                                        maximize ? Direction::Max : Direction::Min);
        const char* status = s.status == BoundStatus::Certified ? "certified"
                             : s.status == BoundStatus::Empty   ? "empty"
                                                                : "uninformative";
        return py::make_tuple(s.bound, status);
      },
      py::arg("vars"), py::arg("equalities"), py::arg("box"), py::arg("var"), py::arg("maximize") = false,
      py::arg("degree") = 4, "Certified bound on min (or max) of one coordinate; returns (bound, status).");

  m.def(
      "detect_empty",
      [](const std::vector<std::string>& vars, const std::vector<std::string>& equalities, const Sides& box,
         unsigned degree) { return detect_empty_in_box(make_system(vars, equalities, {}), to_box(box), degree); },
      py::arg("vars"), py::arg("equalities"), py::arg("box"), py::arg("degree") = 4);

  m.def(
      "sample",
      [](const std::vector<std::string>& vars, const std::vector<std::string>& equalities, const Sides& box,
         std::size_t count) { return sample_variety(make_system(vars, equalities, {}), to_box(box), count); },
      py::arg("vars"), py::arg("equalities"), py::arg("box"), py::arg("count") = 1000,
      "Points on the variety, for checking enclosures.");

  m.def(
      "coverage",
      [](const std::vector<Point>& points, const std::vector<Sides>& boxes, double inflation) {
        std::vector<Box> bs;
        for (const auto& b : boxes) bs.push_back(to_box(b));
        CoverageReport r = verify_enclosure(points, bs, inflation);
        return py::make_tuple(r.covered, r.total_samples);
      },
      py::arg("points"), py::arg("boxes"), py::arg("inflation") = 1e-6, "Returns (covered, total).");

  m.def(
      "path",
      [](const std::vector<Sides>& boxes, const std::vector<Edge>& edges, std::size_t from, std::size_t to) {
        BoxGraph g;
        for (const auto& b : boxes) g.boxes.push_back(to_box(b));
        g.edges = edges;
        return query_path(g, from, to);
      },
      py::arg("boxes"), py::arg("edges"), py::arg("start"), py::arg("goal"));

  m.def("sdp_solve_count", &sdp::solve_count);

  m.def(
      "run",
      [](const std::string& command, const std::string& input, const std::string& output) {
        std::ostringstream out, log;
        cli::Overrides ov;
        int code = 1;
        if (command == "enclose") code = cli::cmd_enclose(input, output, ov, out, log);
        else if (command == "skeleton") code = cli::cmd_skeleton(input, output, ov, out, log);
        else if (command == "roadmap") code = cli::cmd_roadmap(input, output, ov, out, log);
        else throw Error("unknown command '" + command + "'");
        return py::make_tuple(code, log.str());
      },
      py::arg("command"), py::arg("problem"), py::arg("output"),
      "Run a command-line pipeline on a problem file; returns (exit code, log).");
}
