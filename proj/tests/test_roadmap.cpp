#include <cmath>
#include <random>

#include "doctest.h"
#include "varbox/error.hpp"
#include "varbox/oracle.hpp"
#include "varbox/roadmap.hpp"

using namespace varbox;

namespace {

const std::vector<std::string> xy{"x", "y"};
const std::vector<std::string> xyz{"x", "y", "z"};
const char* kTorus = "36*(x^2+y^2) - (5+x^2+y^2+z^2)^2";

SkeletonProblem problem(const std::string& g, const std::vector<std::string>& vars, double lo,
                        double hi, double rho, unsigned d) {
  SkeletonProblem sp;
  sp.g = parse_expression(g, vars);
  sp.epsilon = 0.01;
  sp.box = Box::cube(vars.size(), lo, hi);
  sp.config.resolution = rho;
  sp.config.degree = d;
  sp.config.threads = 1;
  return sp;
}

bool connected(const BoxGraph& g, std::size_t a, std::size_t b) { return g.components[a] == g.components[b]; }

}  // namespace

TEST_CASE("skeleton systems") {
  SemialgebraicSystem planar = skeleton_system(parse_expression("x^2+y^2-1", xy), 0.01);
  REQUIRE(planar.equalities.size() == 1);
  CHECK(planar.equalities[0] == parse_expression("x^2+y^2-1.01", xy));
  SemialgebraicSystem torus = skeleton_system(parse_expression(kTorus, xyz), 0.01);
  REQUIRE(torus.equalities.size() == 2);
  CHECK(torus.equalities[1] == parse_expression("-4*z*(5+x^2+y^2+z^2)", xyz));
}

TEST_CASE("slice substitution matches full evaluation") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-6, 6);
  Polynomial g = parse_expression(kTorus, xyz);
  for (int t = 0; t < 100; ++t) {
    const double a = u(rng);
    std::vector<double> q{u(rng), u(rng)};
    const double full = g.evaluate(std::vector<double>{a, q[0], q[1]});
    const double sliced = g.restrict(0, a).evaluate(q);
    CHECK(std::abs(sliced - full) <= 1e-12 * std::max(1.0, std::abs(full)));
  }
}

TEST_CASE("circle: skeleton and critical boxes") {
  SkeletonProblem sp = problem("x^2+y^2-1", xy, -2, 2, 0.25, 2);
  BoxGraph sk = build_skeleton(sp);
  CHECK(sk.component_count == 1);
  std::vector<std::string> warnings;
  auto crit = find_critical_boxes(sk, sp, &warnings);
  REQUIRE(crit.size() == 2);
  CHECK(warnings.size() == 1);
  const double r = std::sqrt(1.01);
  CHECK(crit[0].box.contains(Point{-r, 0.0}, 1e-6));
  CHECK(crit[1].box.contains(Point{r, 0.0}, 1e-6));
  for (const auto& c : crit) {
    REQUIRE(c.point.has_value());
    CHECK(std::abs(sp.g.evaluate(*c.point) - sp.epsilon) <= 1e-6);
    CHECK(std::abs(sp.g.partial_derivative(1).evaluate(*c.point)) <= 1e-6);
  }
  // slices of a planar curve are point sets
  auto slices = recurse_slices(sp, crit);
  for (const auto& s : slices) {
    for (const auto& b : s.graph.boxes) CHECK(b.width(0) == 0.0);
  }
  CHECK_THROWS_AS(build_skeleton(problem("x^2-1", {"x"}, -2, 2, 0.25, 2)), DimensionError);
}

TEST_CASE("sphere: equator skeleton and two critical boxes") {
  SkeletonProblem sp = problem("x^2+y^2+z^2-1", xyz, -2, 2, 0.25, 4);
  BoxGraph sk = build_skeleton(sp);
  CHECK(sk.component_count == 1);
  for (const auto& b : sk.boxes) CHECK(b.contains(Point{b.center()[0], b.center()[1], 0.0}, 1e-6));
  auto crit = find_critical_boxes(sk, sp);
  REQUIRE(crit.size() == 2);
  const double r = std::sqrt(1.01);
  CHECK(crit[0].box.contains(Point{-r, 0.0, 0.0}, 1e-6));
  CHECK(crit[1].box.contains(Point{r, 0.0, 0.0}, 1e-6));
}

TEST_CASE("path queries") {
  BoxGraph g = make_graph({Box::cube(2, 0, 1), Box::cube(2, 1, 2), Box::cube(2, 5, 6),
                           Box(std::vector<double>{1, 0}, std::vector<double>{2, 1})},
                          1e-9);
  // sorted: [0,1]^2, [1,2]x[0,1], [1,2]^2, [5,6]^2
  CHECK(query_path(g, 0, 0) == std::vector<std::size_t>{0});
  CHECK(query_path(g, 0, 2) == std::vector<std::size_t>{0, 2});
  CHECK_FALSE(query_path(g, 0, 3).has_value());
  CHECK_THROWS_AS(query_path(g, 0, 4), Error);

  // tie-break: 0 -> {1, 2} -> 3, both one hop; the lower index is used
  BoxGraph diamond;
  diamond.boxes.assign(4, Box::cube(1, 0, 1));
  diamond.edges = {{0, 2}, {0, 1}, {1, 3}, {2, 3}};
  CHECK(query_path(diamond, 0, 3) == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("assemble and link on the circle") {
  SkeletonProblem sp = problem("x^2+y^2-1", xy, -2, 2, 0.25, 2);
  BoxGraph sk = build_skeleton(sp);
  const double tol = sp.config.adjacency_tol_for(sp.box);
  BoxGraph same = assemble(sk, {}, {}, tol);
  CHECK(same.boxes == sk.boxes);
  CHECK(same.edges == sk.edges);

  auto crit = find_critical_boxes(sk, sp);
  BoxGraph all = assemble(sk, crit, recurse_slices(sp, crit), tol);
  CHECK(all.boxes.size() >= sk.boxes.size());
  // pairs connected before stay connected
  for (std::size_t i = 0; i < sk.boxes.size(); ++i) {
    auto a = locate(all, sk.boxes[i].center(), 0.0);
    auto b = locate(all, sk.boxes[0].center(), 0.0);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(connected(all, *a, *b));
  }

  CHECK_THROWS_AS(link_point({2.0, 2.0}, sk, sp), Error);  // g = 7
  CHECK_THROWS_AS(link_point({5.0, 0.0}, sk, sp), Error);  // outside the box
  // a point already inside a roadmap box needs nothing new
  const Point on{std::sqrt(1.01), 0.0};
  LinkResult l = link_point(on, sk, sp);
  CHECK_FALSE(l.added_slice);
  CHECK(l.graph.boxes.size() == sk.boxes.size());
  CHECK(sk.boxes[l.box_index].contains(on, tol));
}

TEST_CASE("two circles are disconnected") {
  SkeletonProblem sp = problem("((x-2)^2+y^2-1)*((x+2)^2+y^2-1)", xy, -4, 4, 0.25, 4);
  RoadmapResult r = lazy_plan(sp, {3.0, 0.0}, {-3.0, 0.0});
  CHECK(r.query_status == QueryStatus::Disconnected);
  CHECK(r.combined.component_count == 2);
  RoadmapResult same = lazy_plan(sp, {3.0, 0.0}, {1.0, 0.0});
  CHECK(same.query_status == QueryStatus::Connected);
  CHECK(same.recursions == 0);
}

TEST_CASE("torus roadmap at coarse resolution") {
  SkeletonProblem sp = problem(kTorus, xyz, -6, 6, 0.5, 5);
  RoadmapResult r = build_roadmap(sp);
  CHECK(r.skeleton.component_count == 2);
  REQUIRE(r.critical_boxes.size() == 4);
  const double expect[] = {-5, -1, 1, 5};
  for (std::size_t i = 0; i < 4; ++i) {
    const Box& b = r.critical_boxes[i].box;
    CHECK(std::abs(b.center()[0] - expect[i]) <= sp.config.resolution);
    REQUIRE(r.critical_boxes[i].point.has_value());
    const Point& p = *r.critical_boxes[i].point;
    CHECK(std::abs(sp.g.evaluate(p) - sp.epsilon) <= 1e-6);
    CHECK(std::abs(sp.g.partial_derivative(1).evaluate(p)) <= 1e-6);
  }
  CHECK(r.combined.component_count == 1);
  auto inner = locate(r.combined, {0.0, 1.0, 0.0}, 1e-6);
  auto outer = locate(r.combined, {0.0, -5.0, 0.0}, 1e-6);
  REQUIRE(inner.has_value());
  REQUIRE(outer.has_value());
  CHECK(query_path(r.combined, *inner, *outer).has_value());

  // soundness of the skeleton against the analytic circles
  SemialgebraicSystem circles(3, {parse_expression("(x^2+y^2-1)*(x^2+y^2-25)", xyz), parse_expression("z", xyz)});
  auto pts = sample_variety(circles, sp.box, 400);
  REQUIRE(pts.size() > 100);
  // the skeleton follows g = eps, which sits within ~1e-3 of the circles
  CHECK(verify_enclosure(pts, r.skeleton.boxes, 1e-3).complete());
}

TEST_CASE("torus lazy queries") {
  SkeletonProblem sp = problem(kTorus, xyz, -6, 6, 0.5, 5);
  RoadmapResult outer = lazy_plan(sp, {5.0, 0.0, 0.0}, {0.0, 5.0, 0.0});
  CHECK(outer.query_status == QueryStatus::Connected);
  CHECK(outer.recursions == 0);
  REQUIRE(!outer.path.empty());
  for (std::size_t i = 1; i < outer.path.size(); ++i) {
    CHECK(outer.combined.boxes[outer.path[i - 1]].intersects(outer.combined.boxes[outer.path[i]], 1e-6));
  }

  RoadmapResult across = lazy_plan(sp, {3.0, 0.0, 2.0}, {0.0, -1.0, 0.0});
  CHECK(across.query_status == QueryStatus::Connected);

  CHECK_THROWS_AS(lazy_plan(sp, {5.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), Error);
}
