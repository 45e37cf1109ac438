#include "varbox/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>

#include "json.hpp"
#include "parallel.hpp"
#include "varbox/error.hpp"
#include "varbox/oracle.hpp"
#include "varbox/problem_io.hpp"
#include "varbox/roadmap.hpp"
#include "varbox/sdp.hpp"

namespace varbox::cli {

using nlohmann::json;

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

EnclosureConfig make_config(const ProblemFile& p, const Overrides& ov) {
  EnclosureConfig c;
  c.resolution = ov.resolution.value_or(p.resolution);
  c.degree = ov.degree.value_or(p.degree);
  if (ov.threads) c.threads = *ov.threads;
  if (ov.budget) c.budget = *ov.budget;
  else if (p.budget) c.budget = *p.budget;
  c.adjacency_tolerance = p.adjacency_tolerance;
  c.validate();
  return c;
}

json config_echo(const EnclosureConfig& c, const Box& box, std::optional<double> eps) {
  json j{{"resolution", c.resolution},
         {"degree", c.degree},
         {"threads", detail::resolve_threads(c.threads)},
         {"budget", c.budget},
         {"adjacency_tolerance", c.adjacency_tol_for(box)}};
  if (eps) j["epsilon"] = *eps;
  return j;
}

double epsilon_for(const ProblemFile& p, const Overrides& ov) {
  const double eps = ov.epsilon.value_or(p.epsilon ? *p.epsilon : ov.resolution.value_or(p.resolution) / 10.0);
  if (!(eps > 0.0)) throw Error("epsilon must be positive");
  return eps;
}

void emit(const ResultFile& r, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-") write_result(out, r);
  else save_result(output, r);
}

/// Runs body, mapping library errors to exit code 1.
int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return InputError;
  }
}

SkeletonProblem skeleton_problem(const ProblemFile& p, const Overrides& ov) {
  SkeletonProblem sp;
  sp.g = p.g();
  sp.epsilon = epsilon_for(p, ov);
  sp.box = p.box;
  sp.config = make_config(p, ov);
  sp.validate();
  return sp;
}

void report_graph(std::ostream& log, const std::string& what, const BoxGraph& g) {
  log << what << ": " << g.boxes.size() << " boxes, " << g.component_count << " component(s)"
      << (g.incomplete ? ", budget exhausted" : "") << '\n';
}

}  // namespace

int cmd_enclose(const std::string& input, const std::string& output, const Overrides& ov,
                std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    Timer total;
    ProblemFile p = load_problem(input);
    const EnclosureConfig cfg = make_config(p, ov);
    const SemialgebraicSystem sys = p.system();
    const double t_load = total.seconds();
    const auto sdp0 = sdp::solve_count();
    Timer t;
    BoxGraph g = enclose(sys, p.box, cfg);
    ResultFile r = make_result("enclose", p.vars, g);
    json meta{{"wall_time", {{"load", t_load}, {"enclose", t.seconds()}}},
              {"sdp_solves", sdp::solve_count() - sdp0},
              {"boxes_processed", g.processed},
              {"config", config_echo(cfg, p.box, std::nullopt)}};
    meta["wall_time"]["total"] = total.seconds();
    r.metadata_json = meta.dump();
    emit(r, output, out);
    report_graph(log, "enclosure", g);
    return g.incomplete ? Exhausted : Ok;
  });
}

int cmd_skeleton(const std::string& input, const std::string& output, const Overrides& ov,
                 std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    Timer total;
    ProblemFile p = load_problem(input);
    const SkeletonProblem sp = skeleton_problem(p, ov);
    const double t_load = total.seconds();
    const auto sdp0 = sdp::solve_count();
    Timer t;
    BoxGraph g = build_skeleton(sp);
    ResultFile r = make_result("skeleton", p.vars, g);
    json meta{{"wall_time", {{"load", t_load}, {"skeleton", t.seconds()}}},
              {"sdp_solves", sdp::solve_count() - sdp0},
              {"boxes_processed", g.processed},
              {"config", config_echo(sp.config, sp.box, sp.epsilon)}};
    meta["wall_time"]["total"] = total.seconds();
    r.metadata_json = meta.dump();
    emit(r, output, out);
    report_graph(log, "skeleton", g);
    return g.incomplete ? Exhausted : Ok;
  });
}

int cmd_roadmap(const std::string& input, const std::string& output, const Overrides& ov,
                std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    Timer total;
    ProblemFile p = load_problem(input);
    const SkeletonProblem sp = skeleton_problem(p, ov);
    if (p.start.has_value() != p.goal.has_value()) {
      throw Error("problem file: start and goal must be given together");
    }
    const bool query = p.start.has_value();
    const double t_load = total.seconds();
    const auto sdp0 = sdp::solve_count();
    Timer t;
    RoadmapResult rm = query ? lazy_plan(sp, *p.start, *p.goal) : build_roadmap(sp);
    const double t_run = t.seconds();

    ResultFile r = make_result("roadmap", p.vars, rm.combined);
    for (const auto& c : rm.critical_boxes) r.critical_boxes.push_back(c.box);
    for (const auto& s : rm.slice_skeletons) {
      r.slices.push_back({s.value, s.graph.boxes.size(), s.graph.component_count});
    }
    r.warnings = rm.warnings;
    if (query) {
      r.query_status = to_string(rm.query_status);
      r.path = rm.path;
    }
    json meta{{"wall_time", {{"load", t_load}, {query ? "lazy_plan" : "roadmap", t_run}}},
              {"sdp_solves", sdp::solve_count() - sdp0},
              {"skeleton_boxes", rm.skeleton.boxes.size()},
              {"skeleton_components", rm.skeleton.component_count},
              {"recursions", rm.recursions},
              {"config", config_echo(sp.config, sp.box, sp.epsilon)}};
    meta["wall_time"]["total"] = total.seconds();
    r.metadata_json = meta.dump();
    emit(r, output, out);
    report_graph(log, "roadmap", rm.combined);
    for (const auto& w : rm.warnings) log << "warning: " << w << '\n';
    if (!query) return rm.incomplete ? Exhausted : Ok;
    log << "query: " << to_string(rm.query_status);
    if (!rm.path.empty()) log << ", path of " << rm.path.size() << " boxes";
    log << '\n';
    switch (rm.query_status) {
      case QueryStatus::Connected: return Ok;
      case QueryStatus::Disconnected: return Negative;
      case QueryStatus::Unresolved: return Exhausted;
    }
    return Exhausted;
  });
}

int cmd_verify(const std::string& result, const std::string& problem, std::size_t samples,
               std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    ResultFile r = load_result(result);
    ProblemFile p = load_problem(problem);
    if (!r.vars.empty() && r.vars != p.vars) throw Error("result and problem files use different variables");
    SemialgebraicSystem sys = p.system();
    if (r.mode == "skeleton" || r.mode == "roadmap") {
      double eps = p.epsilon_or_default();
      if (!r.metadata_json.empty()) {
        json meta = json::parse(r.metadata_json);
        if (meta.contains("config") && meta["config"].contains("epsilon")) {
          eps = meta["config"]["epsilon"].get<double>();
        }
      }
      sys = skeleton_system(p.g(), eps);
    }
    auto pts = sample_variety(sys, p.box, samples);
    CoverageReport rep = verify_enclosure(pts, r.boxes, 1e-6);
    out << "samples: " << rep.total_samples << '\n'
        << "covered: " << rep.covered << '\n'
        << "missed: " << rep.missed << '\n';
    const auto old = out.precision(17);
    for (const auto& m : rep.missed_points) {
      out << "missed point:";
      for (double v : m) out << ' ' << v;
      out << '\n';
    }
    out.precision(old);
    return rep.complete() ? Ok : Negative;
  });
}

int cmd_export(const std::string& result, const std::string& format, const std::string& output,
               std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    if (format != "csv" && format != "obj") throw Error("unknown export format '" + format + "'");
    ResultFile r = load_result(result);
    std::ofstream file;
    std::ostream* os = &out;
    if (!output.empty() && output != "-") {
      file.open(output);
      if (!file) throw Error("cannot write '" + output + "'");
      os = &file;
    }
    if (format == "csv") write_boxes_csv(*os, r);
    else write_boxes_obj(*os, r);
    return Ok;
  });
}

}  // namespace varbox::cli
