#include <cmath>
#include <random>

#include "doctest.h"
#include "varbox/error.hpp"
#include "varbox/lasserre.hpp"
#include "varbox/oracle.hpp"

using namespace varbox;

namespace {

const std::vector<std::string> xy{"x", "y"};

SemialgebraicSystem circle_system() {
  return SemialgebraicSystem(2, {parse_expression("x^2+y^2-1", xy)});
}

SemialgebraicSystem clover_system() {
  return SemialgebraicSystem(2, {parse_expression("(x^2+y^2)^2 - x^3 + 3*x*y^2", xy)});
}

double monomial_value(const ExponentVector& a, const std::vector<double>& x) {
  double v = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) v *= std::pow(x[j], a[j]);
  return v;
}

}  // namespace

TEST_CASE("constraint list order and counts") {
  ConstraintSet cs = build_constraints(circle_system(), Box::cube(2, -1, 1));
  CHECK(cs.c() == 7);
  CHECK(cs.ball_bound == 4);
  CHECK(cs.e[0] == Polynomial::constant(2, 1.0));
  CHECK(cs.e[1] == parse_expression("x + 1", xy));
  CHECK(cs.e[3] == parse_expression("1 - x", xy));
  CHECK(cs.e[5] == parse_expression("x^2+y^2-1", xy));
  CHECK(cs.e[6] == parse_expression("1-x^2-y^2", xy));
  CHECK(cs.e[7] == parse_expression("4-x^2-y^2", xy));

  for (std::size_t n = 1; n <= 4; ++n) {
    ConstraintSet u = build_constraints(SemialgebraicSystem(n, {}), Box::cube(n, 0, 1));
    CHECK(u.ball_bound == static_cast<long long>(n));
    CHECK(u.c() == 2 * n + 1);
  }

  ConstraintSet cl = build_constraints(clover_system(), Box::cube(2, -2, 2));
  const std::vector<double> origin{0, 0};
  CHECK(cl.e[5].evaluate(origin) == 0.0);
  CHECK(cl.e[6].evaluate(origin) == 0.0);
  CHECK(cl.e[6] == -cl.e[5]);

  CHECK_THROWS_AS(build_constraints(circle_system(), Box::cube(3, -1, 1)), DimensionError);
}

TEST_CASE("relaxation block shapes") {
  // n = 1, box [0, 3]: e_1 = x gets a 1x1 block at d = 2
  ConstraintSet cs = build_constraints(SemialgebraicSystem(1, {}), Box::cube(1, 0, 3));
  sdp::BlockSDP p = build_relaxation(cs, 2, 0, Direction::Min);
  REQUIRE(p.block_sizes == std::vector<int>{2, 1, 1, 1});
  REQUIRE(p.constraints.size() == 2);  // rows x, x^2
  CHECK(p.constraints[0].a.blocks[1](0, 0) == 1.0);
  CHECK(p.objective.blocks[1](0, 0) == 0.0);
  CHECK(p.constraints[1].a.blocks[1](0, 0) == 0.0);
  CHECK(p.constraints[0].rhs == 1.0);
  CHECK(build_relaxation(cs, 2, 0, Direction::Max).constraints[0].rhs == -1.0);

  ConstraintSet c2 = build_constraints(SemialgebraicSystem(2, {}), Box::cube(2, -1, 1));
  CHECK(build_relaxation(c2, 4, 0, Direction::Min).block_sizes == std::vector<int>{6, 3, 3, 3, 3, 3});

  // degree too small for the quartic clover
  ConstraintSet cl = build_constraints(clover_system(), Box::cube(2, -2, 2));
  CHECK_THROWS_AS(build_relaxation(cl, 3, 0, Direction::Min), Error);
  CHECK_NOTHROW(build_relaxation(cl, 5, 0, Direction::Min));
}

TEST_CASE("coefficient matrices reconstruct b b' e_j") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  SemialgebraicSystem sys(2, {parse_expression("(x^2+y^2)^2 - x^3 + 3*x*y^2", xy)},
                          {parse_expression("1 - x*y", xy)});
  ConstraintSet cs = build_constraints(sys, Box(std::vector<double>{-2, -1}, std::vector<double>{1, 2}));
  const unsigned d = 6;
  sdp::BlockSDP p = build_relaxation(cs, d, 1, Direction::Min);
  RelaxationSpec spec = make_spec(cs, d, 1, Direction::Min);
  // rows follow the basis, skipping 0 and any monomial that never occurs
  std::vector<ExponentVector> rows;
  for (std::size_t i = 1; i < spec.basis.size(); ++i) rows.push_back(spec.basis[i]);
  REQUIRE(rows.size() == p.constraints.size());
  REQUIRE(p.block_sizes.size() == cs.e.size());
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x{u(rng), u(rng)};
    for (std::size_t j = 0; j < cs.e.size(); ++j) {
      auto basis = monomial_basis(2, spec.block_degrees[j]);
      REQUIRE(static_cast<int>(basis.size()) == p.block_sizes[j]);
      const double ej = cs.e[j].evaluate(x) / cs.e[j].max_abs_coefficient();
      for (std::size_t b = 0; b < basis.size(); ++b) {
        for (std::size_t g = 0; g < basis.size(); ++g) {
          const auto bi = static_cast<Eigen::Index>(b), gi = static_cast<Eigen::Index>(g);
          double sum = -p.objective.blocks[j](bi, gi);
          for (std::size_t r = 0; r < rows.size(); ++r) {
            sum += p.constraints[r].a.blocks[j](bi, gi) * monomial_value(rows[r], x);
          }
          const double want = monomial_value(basis[b], x) * monomial_value(basis[g], x) * ej;
          CHECK(std::abs(sum - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
      }
    }
  }
}

TEST_CASE("bounds on x over {x^2 = 1}") {
  SemialgebraicSystem sys(1, {parse_expression("x^2-1", {"x"})});
  ConstraintSet cs = build_constraints(sys, Box::cube(1, -2, 2));
  MomentSolution b2 = bound(cs, 2, 0, Direction::Min);
  CHECK(b2.status == BoundStatus::Certified);
  CHECK(b2.bound <= -1.0);
  MomentSolution b4 = bound(cs, 4, 0, Direction::Min);
  CHECK(b4.bound <= -1.0);
  CHECK(b4.bound >= -1.0 - 1e-4);
  MomentSolution m4 = bound(cs, 4, 0, Direction::Max);
  CHECK(m4.bound >= 1.0);
  CHECK(m4.bound <= 1.0 + 1e-4);

  MomentSolution n4 = bound_in_box(sys, Box::cube(1, -2, 2), 4, 0, Direction::Min);
  CHECK(n4.bound <= -1.0);
  CHECK(n4.bound >= -1.0 - 1e-4);
}

TEST_CASE("bound of a box coordinate is the box edge") {
  for (std::size_t n = 1; n <= 3; ++n) {
    Box box = Box::cube(n, -0.7, 1.3);
    ConstraintSet cs = build_constraints(SemialgebraicSystem(n, {}), box);
    MomentSolution lo = bound(cs, 2, 0, Direction::Min);
    CHECK(lo.bound == doctest::Approx(-0.7).epsilon(1e-6));
    CHECK(lo.bound <= -0.7);
    MomentSolution hi = bound(cs, 2, n - 1, Direction::Max);
    CHECK(hi.bound == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(hi.bound >= 1.3);
  }
}

TEST_CASE("circle against [0.5, 1.5]^2") {
  Box box = Box::cube(2, 0.5, 1.5);
  double prev = -1e300;
  for (unsigned d : {2u, 4u, 6u}) {
    MomentSolution s = bound_in_box(circle_system(), box, d, 0, Direction::Min);
    REQUIRE(s.status == BoundStatus::Certified);
    CHECK(s.bound <= 0.5);
    CHECK(s.bound >= prev - 1e-9);
    prev = s.bound;
  }
  CHECK(prev == doctest::Approx(0.5).epsilon(1e-4));
  MomentSolution up = bound_in_box(circle_system(), box, 4, 0, Direction::Max);
  CHECK(up.bound >= std::sqrt(0.75));
  CHECK(up.bound <= std::sqrt(0.75) + 1e-3);
}

TEST_CASE("emptiness certificates") {
  CHECK(detect_empty(build_constraints(circle_system(), Box::cube(2, 2, 3)), 2));
  CHECK(detect_empty_in_box(circle_system(), Box::cube(2, 2, 3), 2));
  CHECK_FALSE(detect_empty(build_constraints(circle_system(), Box::cube(2, 0, 1)), 2));
  CHECK_FALSE(detect_empty_in_box(circle_system(), Box::cube(2, 0, 1), 4));
  CHECK(detect_empty_in_box(clover_system(), Box::cube(2, 1.5, 2), 5));
  // no real points at all
  SemialgebraicSystem none(2, {parse_expression("x^2+y^2+1", xy)});
  CHECK(detect_empty_in_box(none, Box::cube(2, -1, 1), 2));
}

TEST_CASE("minimizer extraction") {
  SemialgebraicSystem one(1, {parse_expression("x^2-1", {"x"})});
  MomentSolution s = bound_in_box(one, Box::cube(1, 0, 2), 4, 0, Direction::Min);
  auto p = extract_minimizer(s);
  REQUIRE(p.has_value());
  CHECK((*p)[0] == doctest::Approx(1.0).epsilon(1e-8));

  // min y over {x^2 = 1} within [-2, 2]^2: mass splits between (-1, -2) and (1, -2)
  SemialgebraicSystem two(2, {parse_expression("x^2-1", xy)});
  MomentSolution t = bound_in_box(two, Box::cube(2, -2, 2), 4, 1, Direction::Min);
  CHECK(t.bound == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK_FALSE(extract_minimizer(t).has_value());

  MomentSolution c = bound_in_box(circle_system(), Box::cube(2, 0.5, 1.5), 6, 0, Direction::Min);
  auto q = extract_minimizer(c);
  REQUIRE(q.has_value());
  CHECK((*q)[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK((*q)[1] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-3));
}

TEST_CASE("bounds never cut off sampled points") {
  const std::vector<std::string> xyz{"x", "y", "z"};
  std::vector<std::pair<SemialgebraicSystem, Box>> cases{
      {clover_system(), Box::cube(2, -2, 2)},
      {clover_system(), Box(std::vector<double>{-0.2, 0.1}, std::vector<double>{0.9, 0.8})},
      {circle_system(), Box(std::vector<double>{0.3, -0.4}, std::vector<double>{1.2, 0.9})},
      {SemialgebraicSystem(3, {parse_expression("36*(x^2+y^2) - (5+x^2+y^2+z^2)^2 - 0.01", xyz),
                               parse_expression("-4*z*(5+x^2+y^2+z^2)", xyz)}),
       Box(std::vector<double>{0.5, -1, -1}, std::vector<double>{3, 1, 1})},
  };
  for (const auto& [sys, box] : cases) {
    auto pts = sample_variety(sys, box, 300);
    REQUIRE(!pts.empty());
    for (std::size_t i = 0; i < sys.n; ++i) {
      MomentSolution lo = bound_in_box(sys, box, 5, i, Direction::Min);
      MomentSolution hi = bound_in_box(sys, box, 5, i, Direction::Max);
      CHECK(lo.status != BoundStatus::Empty);
      CHECK(hi.status != BoundStatus::Empty);
      for (const auto& p : pts) {
        CHECK(p[i] >= lo.bound - 1e-6);
        CHECK(p[i] <= hi.bound + 1e-6);
      }
    }
    CHECK_FALSE(detect_empty_in_box(sys, box, 5));
  }
}
