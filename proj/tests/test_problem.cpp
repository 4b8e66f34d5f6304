#include "drcp/problem.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace drcp;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST_CASE("global objective of the section 5 costs") {
  const auto inst = build_section5_instance();
  CHECK(evaluate_global_objective(inst, v2(0, 0)) == doctest::Approx(44.0).epsilon(1e-15));
  CHECK(evaluate_global_objective(inst, v2(0, std::sqrt(7.0) / 4)) ==
        doctest::Approx(38.68774606680623).epsilon(1e-13));

  ProblemInstance zero = inst;
  for (auto& f : zero.costs) f = ConvexFunction{[](const Vec&) { return 0.0; }, [](const Vec& x) {
                                                  return Vec::Zero(x.size()).eval();
                                                }, {}};
  CHECK(evaluate_global_objective(zero, v2(1.3, -0.2)) == 0.0);
}

TEST_CASE("section 5 constraint values") {
  const auto inst = build_section5_instance();
  CHECK(inst.m == 6);
  CHECK(inst.n == 2);
  CHECK(inst.constraints[0](v2(0, 0), 1.0) == doctest::Approx(-1.4375));
  CHECK(inst.constraints[3](v2(0.25, 0), 0.0) == doctest::Approx(-1.0));
  CHECK(inst.costs[0](v2(0, 6)) == 0.0);
  CHECK(inst.constraints[5].uncertainty.lo == -1.0);
  CHECK(inst.constraints[5].uncertainty.hi == 1.0);
  CHECK(inst.box.lower()(0) == -2.0);
  CHECK(inst.box.upper()(1) == 1.0);
}

TEST_CASE("nonconvex single-agent instance") {
  const auto inst = build_nonconvex_llp_instance();
  CHECK(inst.m == 1);
  CHECK(inst.constraints[0](v2(0, 0.5), 1.0) == doctest::Approx(0.5));
  CHECK(inst.constraints[0](v2(1, 0), 0.0) == doctest::Approx(-0.36787944117144233).epsilon(1e-15));
  CHECK(inst.costs[0](v2(0.3, 1.0)) == doctest::Approx(-1.0));
  CHECK(instance_by_name("fig9").name == inst.name);
  CHECK_THROWS_AS(instance_by_name("nope"), std::invalid_argument);
}

TEST_CASE("subgradients match central differences") {
  std::mt19937_64 rng(7);
  for (const auto& inst : {build_section5_instance(), build_nonconvex_llp_instance()}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vec x = testing::uniform_point(rng, inst.box);
      std::uniform_real_distribution<double> uy(inst.constraints[0].uncertainty.lo,
                                                inst.constraints[0].uncertainty.hi);
      for (int i = 0; i < inst.m; ++i) {
        const auto& f = inst.costs[static_cast<std::size_t>(i)];
        CHECK((f.subgradient(x) - testing::central_difference(f.eval, x)).norm() < 1e-6);
        const double y = uy(rng);
        const auto gy = inst.constraints[static_cast<std::size_t>(i)].at(y);
        CHECK((gy.subgradient(x) - testing::central_difference(gy.eval, x)).norm() < 1e-6);
      }
    }
  }
}

TEST_CASE("section 5 functions are convex in x on sampled triples") {
  const auto inst = build_section5_instance();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.0, 1.0), uy(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec a = testing::uniform_point(rng, inst.box);
    const Vec b = testing::uniform_point(rng, inst.box);
    const double l = lam(rng), y = uy(rng);
    const Vec c = l * a + (1 - l) * b;
    for (int i = 0; i < inst.m; ++i) {
      const auto& f = inst.costs[static_cast<std::size_t>(i)];
      CHECK(f(c) <= l * f(a) + (1 - l) * f(b) + 1e-12);
      const auto& g = inst.constraints[static_cast<std::size_t>(i)];
      CHECK(g(c, y) <= l * g(a, y) + (1 - l) * g(b, y) + 1e-12);
      // subgradient inequality
      CHECK(f(b) >= f(a) + f.subgradient(a).dot(b - a) - 1e-12);
    }
  }
}

TEST_CASE("instances evaluate deterministically") {
  std::mt19937_64 rng(3);
  const auto a = build_section5_instance();
  const auto b = build_section5_instance();
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = testing::uniform_point(rng, a.box);
    for (int i = 0; i < a.m; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      CHECK(a.costs[ii](x) == b.costs[ii](x));
      CHECK(a.constraints[ii](x, 0.3) == b.constraints[ii](x, 0.3));
    }
  }
}

TEST_CASE("validation") {
  CHECK_NOTHROW(build_section5_instance().validate());
  CHECK_NOTHROW(build_nonconvex_llp_instance().validate());
  auto bad = build_section5_instance();
  bad.costs.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(BoxSet(v2(1, 0), v2(0, 1)), std::invalid_argument);

  const BoxSet box(v2(-1, -1), v2(1, 1));
  CHECK(box.contains(v2(1, -1)));
  CHECK_FALSE(box.contains(v2(1.5, 0)));
  CHECK(box.violation(v2(1.5, -3)) == doctest::Approx(2.0));
  CHECK(box.violation(v2(0, 0)) == 0.0);
}
