#include "varbox/boxer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "varbox/error.hpp"
#include "varbox/oracle.hpp"

namespace varbox {

void EnclosureConfig::validate() const {
  if (!(resolution > 0.0)) throw Error("resolution must be positive");
  if (degree < 2) throw Error("relaxation degree must be at least 2");
  if (max_sweeps < 1) throw Error("at least one shrink sweep is required");
  if (!(improvement >= 0.0)) throw Error("improvement threshold must be non-negative");
  if (!(min_width >= 0.0)) throw Error("minimum width must be non-negative");
  if (adjacency_tolerance && !(*adjacency_tolerance >= 0.0)) {
    throw Error("adjacency tolerance must be non-negative");
  }
  if (budget == 0) throw Error("box budget must be positive");
}

double EnclosureConfig::adjacency_tol_for(const Box& initial) const {
  return adjacency_tolerance ? *adjacency_tolerance : 1e-9 * initial.diameter();
}

ShrinkOutcome shrink(const Box& b, const SemialgebraicSystem& sys, const EnclosureConfig& cfg) {
  if (b.dimension() != sys.n) throw DimensionError("system/box dimension mismatch");
  const std::size_t n = b.dimension();
  ShrinkOutcome out;
  out.witness.assign(n, std::nullopt);
  if (!interval_feasible(sys, b) || detect_empty_in_box(sys, b, cfg.degree, cfg.relaxation)) {
    out.kind = ShrinkKind::Empty;
    return out;
  }
  Box cur = b;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = cur.width(i);
      if (w <= cfg.min_width) continue;
      MomentSolution lo = bound_in_box(sys, cur, cfg.degree, i, Direction::Min, cfg.relaxation);
      if (lo.status == BoundStatus::Empty) {
        out.kind = ShrinkKind::Empty;
        return out;
      }
      MomentSolution hi = bound_in_box(sys, cur, cfg.degree, i, Direction::Max, cfg.relaxation);
      if (hi.status == BoundStatus::Empty) {
        out.kind = ShrinkKind::Empty;
        return out;
      }
      const double l = std::max(cur.lower(i), lo.bound);
      const double u = std::min(cur.upper(i), hi.bound);
      if (l > u) {
        out.kind = ShrinkKind::Empty;
        return out;
      }
      // a little slack on top of the certified values, never past the old side
      const double margin = 1e-12 * w;
      const double nl = std::max(cur.lower(i), l - margin);
      const double nu = std::min(cur.upper(i), u + margin);
      if (nl - cur.lower(i) > cfg.improvement * w || cur.upper(i) - nu > cfg.improvement * w) {
        improved = true;
      }
      cur = cur.with_side(i, {nl, nu});

      auto wit = extract_minimizer(lo, cfg.relaxation);
      if (!wit) wit = extract_minimizer(hi, cfg.relaxation);
      if (wit) out.witness[i] = std::move(wit);
    }
    if (!improved) break;
  }
  out.box = std::move(cur);
  return out;
}

std::pair<Box, Box> split(const Box& b, const std::optional<Point>& witness) {
  if (!(b.longest_side() > 0.0)) throw Error("cannot split a degenerate box");
  const std::size_t k = b.longest_dimension();
  const double lo = b.lower(k), hi = b.upper(k), w = hi - lo;
  double at = 0.5 * (lo + hi);
  if (witness && witness->size() == b.dimension()) {
    const double c = (*witness)[k];
    if (c >= lo + 0.1 * w && c <= hi - 0.1 * w) at = c;
  }
  return {b.with_side(k, {lo, at}), b.with_side(k, {at, hi})};
}

namespace {

// Witness whose coordinate along the split dimension sits closest to the
// middle. The witness from the split dimension itself lies on an edge after
// shrinking, so others are preferred.
std::optional<Point> pick_witness(const Box& b, const std::vector<std::optional<Point>>& ws) {
  if (!(b.longest_side() > 0.0)) return std::nullopt;
  const std::size_t k = b.longest_dimension();
  const double mid = 0.5 * (b.lower(k) + b.upper(k));
  std::optional<Point> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (!ws[i] || i == k) continue;
    const double d = std::abs((*ws[i])[k] - mid);
    if (!best || d < best_d) {
      best = ws[i];
      best_d = d;
    }
  }
  return best;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

BoxGraph enclose(const SemialgebraicSystem& sys, const Box& initial, const EnclosureConfig& cfg) {
  cfg.validate();
  sys.validate();
  if (initial.dimension() != sys.n) throw DimensionError("system/box dimension mismatch");
  // fail early on a degree that cannot hold the generators
  make_spec(build_constraints(sys, initial), cfg.degree, 0, Direction::Min);

  std::vector<Box> final_boxes;
  std::vector<Box> current{initial};
  std::size_t processed = 0;
  bool incomplete = false;
  auto is_final = [&](const Box& b) {
    return b.longest_side() <= cfg.resolution || b.longest_side() <= cfg.min_width;
  };

  while (!current.empty()) {
    if (processed + current.size() > cfg.budget) {
      incomplete = true;
      for (auto& b : current) final_boxes.push_back(std::move(b));
      break;
    }
    std::vector<ShrinkOutcome> results(current.size());
    detail::parallel_for(current.size(), cfg.threads,
                         [&](std::size_t i) { results[i] = shrink(current[i], sys, cfg); });
    processed += current.size();
    std::vector<Box> next;
    for (auto& r : results) {
      if (r.kind == ShrinkKind::Empty) continue;
      if (is_final(r.box)) {
        final_boxes.push_back(std::move(r.box));
        continue;
      }
      auto [a, b] = split(r.box, pick_witness(r.box, r.witness));
      next.push_back(std::move(a));
      next.push_back(std::move(b));
    }
    current = std::move(next);
  }

  BoxGraph g = make_graph(std::move(final_boxes), cfg.adjacency_tol_for(initial));
  g.incomplete = incomplete;
  g.processed = processed;
  return g;
}

std::vector<Edge> adjacency(const std::vector<Box>& boxes, double tol) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  if (boxes.empty()) return {};
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return boxes[a].lower(0) < boxes[b].lower(0); });
  std::vector<Edge> edges;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const Box& a = boxes[order[p]];
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const Box& b = boxes[order[q]];
      if (b.lower(0) > a.upper(0) + tol) break;
      if (a.intersects(b, tol)) {
        edges.emplace_back(std::min(order[p], order[q]), std::max(order[p], order[q]));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::size_t> connected_components(std::size_t count, const std::vector<Edge>& edges,
                                              std::size_t* component_count) {
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& [i, j] : edges) {
    if (i >= count || j >= count) throw Error("edge index out of range");
    const std::size_t a = find_root(parent, i), b = find_root(parent, j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> id(count), label(count, count);
  std::size_t next = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r = find_root(parent, i);
    if (label[r] == count) label[r] = next++;
    id[i] = label[r];
  }
  if (component_count) *component_count = next;
  return id;
}

BoxGraph make_graph(std::vector<Box> boxes, double tol) {
  std::sort(boxes.begin(), boxes.end());
  BoxGraph g;
  g.boxes = std::move(boxes);
  g.edges = adjacency(g.boxes, tol);
  g.components = connected_components(g.boxes.size(), g.edges, &g.component_count);
  return g;
}

}  // namespace varbox
