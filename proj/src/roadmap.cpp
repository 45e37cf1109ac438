#include "varbox/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "varbox/error.hpp"
#include "varbox/oracle.hpp"

namespace varbox {

void SkeletonProblem::validate() const {
  config.validate();
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (g.dimension() != box.dimension()) throw DimensionError("polynomial/box dimension mismatch");
  if (box.dimension() == 0) throw DimensionError("empty configuration space");
}

SemialgebraicSystem skeleton_system(const Polynomial& g, double epsilon) {
  const std::size_t n = g.dimension();
  std::vector<Polynomial> eqs{g - Polynomial::constant(n, epsilon)};
  for (std::size_t j = 2; j < n; ++j) eqs.push_back(g.partial_derivative(j));
  return SemialgebraicSystem(n, std::move(eqs));
}

BoxGraph build_skeleton(const SkeletonProblem& sp) {
  sp.validate();
  if (sp.box.dimension() < 2) throw DimensionError("a skeleton needs at least two variables");
  return enclose(skeleton_system(sp.g, sp.epsilon), sp.box, sp.config);
}

namespace {

Box grown_within(const Box& b, double amount, const Box& outer) {
  std::vector<Interval> sides;
  for (std::size_t j = 0; j < b.dimension(); ++j) {
    sides.emplace_back(std::max(b.lower(j) - amount, outer.lower(j)),
                       std::min(b.upper(j) + amount, outer.upper(j)));
  }
  return Box(std::move(sides));
}

}  // namespace

std::vector<CriticalBox> find_critical_boxes(const BoxGraph& skeleton, const SkeletonProblem& sp,
                                             std::vector<std::string>* warnings) {
  sp.validate();
  const std::size_t n = sp.box.dimension();
  if (n < 2) throw DimensionError("critical boxes need at least two variables");
  SemialgebraicSystem aug = skeleton_system(sp.g, sp.epsilon);
  aug.equalities.push_back(sp.g.partial_derivative(1));

  EnclosureConfig inner = sp.config;
  inner.threads = 1;
  // A critical point on a face shared by two skeleton boxes leaves both
  // relaxations nearly degenerate; growing each box by the adjacency
  // tolerance puts the point strictly inside at least one of them.
  const double grow = sp.config.adjacency_tol_for(sp.box);
  std::vector<std::vector<Box>> found(skeleton.boxes.size());
  detail::parallel_for(skeleton.boxes.size(), sp.config.threads, [&](std::size_t i) {
    found[i] = enclose(aug, grown_within(skeleton.boxes[i], grow, sp.box), inner).boxes;
  });
  std::vector<Box> pieces;
  for (auto& f : found) {
    for (auto& b : f) pieces.push_back(std::move(b));
  }

  BoxGraph merged = make_graph(std::move(pieces), sp.config.adjacency_tol_for(sp.box));
  std::vector<std::optional<Box>> hulls(merged.component_count);
  for (std::size_t i = 0; i < merged.boxes.size(); ++i) {
    auto& h = hulls[merged.components[i]];
    h = h ? h->hull(merged.boxes[i]) : merged.boxes[i];
  }
  std::vector<CriticalBox> out;
  for (auto& h : hulls) {
    CriticalBox c{*h, std::nullopt};
    auto p = newton_refine(aug.equalities, h->center());
    if (p && h->contains(*p, sp.config.resolution)) c.point = std::move(p);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalBox& a, const CriticalBox& b) { return a.box < b.box; });

  if (warnings && !out.empty()) {
    std::ostringstream os;
    os.precision(3);
    os << "critical x1 intervals are assumed to hold one critical value each; widths:";
    for (const auto& c : out) os << ' ' << c.box.width(0);
    warnings->push_back(os.str());
  }
  return out;
}

namespace {

struct Boxes {
  std::vector<Box> boxes;
  bool incomplete = false;
};

Boxes roadmap_boxes(const SkeletonProblem& sp);

Boxes slice_boxes(const SkeletonProblem& sp, double value) {
  SkeletonProblem sub{sp.g.restrict(0, value), sp.epsilon, sp.box.dropped(0), sp.config};
  Boxes b = roadmap_boxes(sub);
  for (auto& box : b.boxes) box = box.lifted(0, value);
  return b;
}

Boxes roadmap_boxes(const SkeletonProblem& sp) {
  if (sp.box.dimension() <= 2) {
    BoxGraph g = enclose(skeleton_system(sp.g, sp.epsilon), sp.box, sp.config);
    return {std::move(g.boxes), g.incomplete};
  }
  RoadmapResult r = build_roadmap(sp);
  return {std::move(r.combined.boxes), r.incomplete};
}

}  // namespace

SliceSkeleton slice_roadmap(const SkeletonProblem& sp, double value) {
  sp.validate();
  if (sp.box.dimension() < 2) throw DimensionError("slicing needs at least two variables");
  Boxes b = slice_boxes(sp, value);
  SliceSkeleton s;
  s.value = value;
  s.graph = make_graph(std::move(b.boxes), sp.config.adjacency_tol_for(sp.box));
  s.graph.incomplete = b.incomplete;
  return s;
}

std::vector<SliceSkeleton> recurse_slices(const SkeletonProblem& sp,
                                          const std::vector<CriticalBox>& critical) {
  // both ends of every x1 interval; ends closer than the width floor are one slice
  std::vector<double> values;
  for (const auto& c : critical) {
    values.push_back(c.box.lower(0));
    values.push_back(c.box.upper(0));
  }
  std::sort(values.begin(), values.end());
  std::vector<SliceSkeleton> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && values[i] - values[i - 1] <= sp.config.min_width) continue;
    out.push_back(slice_roadmap(sp, values[i]));
  }
  return out;
}

BoxGraph assemble(const BoxGraph& skeleton, const std::vector<CriticalBox>& critical,
                  const std::vector<SliceSkeleton>& slices, double tol) {
  std::vector<Box> all = skeleton.boxes;
  bool incomplete = skeleton.incomplete;
  for (const auto& c : critical) all.push_back(c.box);
  for (const auto& s : slices) {
    all.insert(all.end(), s.graph.boxes.begin(), s.graph.boxes.end());
    incomplete = incomplete || s.graph.incomplete;
  }
  BoxGraph g = make_graph(std::move(all), tol);
  g.incomplete = incomplete;
  return g;
}

double link_tolerance(const SkeletonProblem& sp) { return std::max(2.0 * sp.epsilon, 1e-9); }

std::optional<std::size_t> locate(const BoxGraph& graph, const Point& p, double tol) {
  std::optional<std::size_t> nearest;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < graph.boxes.size(); ++i) {
    if (graph.boxes[i].contains(p, tol)) return i;
    const double d = graph.boxes[i].distance(p);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  return nearest;
}

namespace {

void check_query_point(const Point& p, const SkeletonProblem& sp) {
  if (p.size() != sp.box.dimension()) throw DimensionError("query point has the wrong dimension");
  if (!sp.box.contains(p)) throw Error("query point lies outside the configuration box");
  const double r = sp.g.evaluate(p) - sp.epsilon;
  if (!(std::abs(r) <= link_tolerance(sp))) {
    std::ostringstream os;
    os << "query point is not on the variety: g(p) - epsilon = " << r;
    throw Error(os.str());
  }
}

}  // namespace

LinkResult link_point(const Point& p, const BoxGraph& roadmap, const SkeletonProblem& sp) {
  sp.validate();
  check_query_point(p, sp);
  const double tol = sp.config.adjacency_tol_for(sp.box);
  LinkResult out;
  for (std::size_t i = 0; i < roadmap.boxes.size(); ++i) {
    if (roadmap.boxes[i].contains(p, tol)) {
      out.graph = roadmap;
      out.box_index = i;
      return out;
    }
  }
  SliceSkeleton s = slice_roadmap(sp, p[0]);
  out.graph = assemble(roadmap, {}, {s}, tol);
  out.added_slice = true;
  auto idx = locate(out.graph, p, tol);
  if (!idx) throw Error("no roadmap box near the query point");
  out.box_index = *idx;
  return out;
}

std::optional<std::vector<std::size_t>> query_path(const BoxGraph& graph, std::size_t from,
                                                   std::size_t to) {
  const std::size_t n = graph.boxes.size();
  if (from >= n || to >= n) throw Error("box index out of range");
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [i, j] : graph.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  std::vector<std::size_t> parent(n, n);
  std::deque<std::size_t> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (std::size_t v : adj[u]) {
      if (parent[v] != n) continue;
      parent[v] = u;
      queue.push_back(v);
    }
  }
  if (parent[to] == n) return std::nullopt;
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::string to_string(QueryStatus s) {
  switch (s) {
    case QueryStatus::Connected: return "connected";
    case QueryStatus::Disconnected: return "disconnected";
    case QueryStatus::Unresolved: return "unresolved";
  }
  return "unknown";
}

RoadmapResult build_roadmap(const SkeletonProblem& sp) {
  RoadmapResult r;
  r.skeleton = build_skeleton(sp);
  r.critical_boxes = find_critical_boxes(r.skeleton, sp, &r.warnings);
  r.slice_skeletons = recurse_slices(sp, r.critical_boxes);
  r.recursions = r.critical_boxes.size();
  r.combined = assemble(r.skeleton, r.critical_boxes, r.slice_skeletons,
                        sp.config.adjacency_tol_for(sp.box));
  r.incomplete = r.combined.incomplete;
  return r;
}

RoadmapResult lazy_plan(const SkeletonProblem& sp, const Point& start, const Point& goal) {
  sp.validate();
  check_query_point(start, sp);
  check_query_point(goal, sp);
  const double tol = sp.config.adjacency_tol_for(sp.box);

  RoadmapResult r;
  r.skeleton = build_skeleton(sp);
  LinkResult a = link_point(start, r.skeleton, sp);
  LinkResult b = link_point(goal, a.graph, sp);
  r.combined = std::move(b.graph);

  auto try_query = [&]() {
    auto from = locate(r.combined, start, tol);
    auto to = locate(r.combined, goal, tol);
    if (!from || !to) return false;
    auto path = query_path(r.combined, *from, *to);
    if (!path) return false;
    r.path = std::move(*path);
    r.query_status = QueryStatus::Connected;
    return true;
  };

  if (!try_query()) {
    r.critical_boxes = find_critical_boxes(r.skeleton, sp, &r.warnings);
    for (const auto& c : r.critical_boxes) {
      auto slices = recurse_slices(sp, {c});
      r.combined = assemble(r.combined, {c}, slices, tol);
      r.slice_skeletons.insert(r.slice_skeletons.end(), slices.begin(), slices.end());
      ++r.recursions;
      if (try_query()) break;
    }
  }
  r.incomplete = r.combined.incomplete;
  if (r.query_status != QueryStatus::Connected) {
    r.query_status = r.incomplete ? QueryStatus::Unresolved : QueryStatus::Disconnected;
  }
  return r;
}

}  // namespace varbox
