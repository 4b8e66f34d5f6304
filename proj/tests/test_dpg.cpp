#include "drcp/dpg.hpp"
#include "drcp/harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace drcp;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

std::vector<std::vector<double>> same_cuts(int m, std::vector<double> ys) {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(m), ys);
}

GraphSchedule single_node() { return GraphSchedule(1, {{}}, 1); }

}  // namespace

TEST_CASE("epigraph problem layout") {
  const auto inst = build_section5_instance();
  const std::vector<double> eps(6, 0.1);
  const auto empty = build_epigraph_problem(inst, eps, same_cuts(6, {}));
  CHECK(empty.local_sets[0].size() == 2);
  CHECK(empty.cost_direction.size() == 8);
  CHECK(empty.cost_direction.norm() == doctest::Approx(1 / std::sqrt(6.0)));
  CHECK(empty.cost_direction.head(2).norm() == 0.0);

  const auto cut = build_epigraph_problem(inst, eps, same_cuts(6, {1.0}));
  const auto& omega = cut.local_sets[0];
  REQUIRE(omega.size() == 3);
  // {(x1 + 0.75)^2 + 2 x2 <= 1.9} for agent 0, with u large enough for the epigraph
  Vec theta = initial_theta(inst);
  theta.tail(6).setConstant(100.0);
  theta.head(2) = v2(-0.75, 0.94);
  CHECK(violation(omega[2], theta) == 0.0);
  theta.head(2) = v2(-0.75, 0.96);
  CHECK(violation(omega[2], theta) == doctest::Approx(0.02));

  CHECK_THROWS_AS(build_epigraph_problem(inst, std::vector<double>(5, 0.1), same_cuts(6, {})),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_epigraph_problem(inst, std::vector<double>(6, 0.0), same_cuts(6, {})),
                  std::invalid_argument);
}

TEST_CASE("epigraph bounds cover every cost on the box") {
  const auto inst = build_section5_instance();
  const auto ub = epigraph_u_bounds(inst);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec x = testing::uniform_point(rng, inst.box);
    for (const auto& f : inst.costs) {
      CHECK(f(x) > ub.lo);
      CHECK(f(x) < ub.hi);
    }
  }
  const Vec theta = initial_theta(inst);
  CHECK(theta.head(2) == v2(0, 0));
  CHECK(theta(2) == doctest::Approx(36.0));
  CHECK(theta(3) == 0.0);
}

TEST_CASE("stepsize") {
  CHECK(stepsize(0, 1.0) == 1.0);
  CHECK(stepsize(3, 1.0) == 0.5);
  CHECK(stepsize(99, 2.0) == doctest::Approx(0.2));
  for (std::int64_t t = 0; t < 100; ++t) CHECK(stepsize(t + 1, 1.0) < stepsize(t, 1.0));
}

TEST_CASE("projected step") {
  const BoxSet box(v2(-1, -1), v2(1, 1));
  const std::vector<ConvexSetDescriptor> omega{ConvexSetDescriptor::box(box)};
  const Vec c = v2(0, 1);
  const std::vector<Vec> one{v2(0, -1)};
  const std::vector<double> w1{1.0};
  CHECK(dpg_step(one, w1, 0.5, c, omega) == v2(0, -1));

  const std::vector<Vec> two{v2(0.4, 0.4), v2(0.0, 0.0)};
  const std::vector<double> w2{0.5, 0.5};
  CHECK((dpg_step(two, w2, 0.5, c, omega) - v2(0.2, -0.3)).norm() < 1e-15);
  CHECK((dpg_step(two, w2, 2.0, c, omega) - v2(0.2, -1.0)).norm() < 1e-15);
}

TEST_CASE("counter recurrences") {
  const auto inst = build_section5_instance();
  const DpgTolerances tol;
  const std::vector<int> nbrs{0, 1};
  std::vector<Vec> states(6, initial_theta(inst));
  std::vector<DpgTerminationCounters> c(6);

  const auto first = update_dpg_counters(0, nbrs, c, states, {}, inst, tol);
  CHECK(first == DpgTerminationCounters{1, 1, 0, 0});

  for (auto& x : c) x = {1, 1, 1, 1};
  const auto steady = update_dpg_counters(0, nbrs, c, states, states, inst, tol);
  CHECK(steady == DpgTerminationCounters{2, 2, 2, 2});

  auto moved = states;
  moved[1](0) += 0.5;
  const auto split = update_dpg_counters(0, nbrs, c, moved, states, inst, tol);
  CHECK(split == DpgTerminationCounters{2, 0, 0, 0});

  c[1] = {0, 5, 5, 5};
  CHECK(update_dpg_counters(0, nbrs, c, states, states, inst, tol).h == 1);
  // agent 2 is not a neighbor: its low counters do not matter
  c[1] = {4, 4, 4, 4};
  c[2] = {0, 0, 0, 0};
  CHECK(update_dpg_counters(0, nbrs, c, states, states, inst, tol).h == 2);
}

TEST_CASE("global stop threshold") {
  std::vector<DpgTerminationCounters> c(4);
  c[2].h = 7;
  CHECK(dpg_global_stop(c, 2, 3));
  c[2].h = 6;
  CHECK_FALSE(dpg_global_stop(c, 2, 3));
  CHECK(detection_threshold_reached(11, 2, 5));
  CHECK_FALSE(detection_threshold_reached(10, 2, 5));
}

TEST_CASE("averaged iterate") {
  AveragedIterate avg;
  CHECK(avg.empty());
  const Vec v = v2(1, 2);
  avg.add(v, 1.0);
  CHECK(avg.value() == v);
  avg.add(v, 0.5);
  avg.add(v, 0.25);
  CHECK((avg.value() - v).norm() < 1e-15);

  AveragedIterate mix;
  mix.add(v2(0, 0), 1.0);
  mix.add(v2(3, 3), 0.5);
  CHECK((mix.value() - v2(1, 1)).norm() < 1e-15);
}

TEST_CASE("diameter resolution") {
  CHECK(resolve_diameter(single_node(), 0) == 1);
  CHECK(resolve_diameter(default_schedule6(), 0) == 4);
  CHECK(resolve_diameter(default_schedule6(), 5) == 5);
}

TEST_CASE("empty local set is reported before any slot") {
  const auto inst = build_section5_instance();
  DpgConfig cfg;
  const auto out = run_dpg(inst, std::vector<double>(6, 5.0), same_cuts(6, {1.0}), default_schedule6(), cfg);
  CHECK_FALSE(out.solved());
  CHECK(out.reason == DpgOutcome::Reason::LocalSetEmpty);
  CHECK(out.empty_agent == 0);
  CHECK(std::string(to_string(out.reason)) == "local_set_empty");
}

TEST_CASE("states stay in the local sets and runs repeat exactly") {
  const auto inst = build_section5_instance();
  const std::vector<double> eps(6, 0.1);
  const auto cuts = same_cuts(6, {1.0});
  const auto prob = build_epigraph_problem(inst, eps, cuts);
  DpgConfig cfg;
  cfg.slot_cap = 200;
  cfg.detect_termination = false;
  double worst = 0.0;
  const auto a = run_dpg(inst, eps, cuts, default_schedule6(), cfg, [&](const SlotView& view) {
    if (view.t == 0) return;
    for (int i = 0; i < 6; ++i) {
      worst = std::max(worst, max_violation(prob.local_sets[static_cast<std::size_t>(i)],
                                            view.states[static_cast<std::size_t>(i)]));
    }
  });
  CHECK(worst <= 1e-9);
  CHECK(a.reason == DpgOutcome::Reason::SlotCapReached);
  CHECK(a.slots_used == 200);
  const auto b = run_dpg(inst, eps, cuts, default_schedule6(), cfg);
  for (int i = 0; i < 6; ++i) CHECK(a.theta[static_cast<std::size_t>(i)] == b.theta[static_cast<std::size_t>(i)]);
}

TEST_CASE("cancellation") {
  const auto inst = build_section5_instance();
  DpgConfig cfg;
  int polls = 0;
  cfg.cancelled = [&] { return ++polls > 5; };
  const auto out = run_dpg(inst, std::vector<double>(6, 0.1), same_cuts(6, {}), default_schedule6(), cfg);
  CHECK(out.reason == DpgOutcome::Reason::Cancelled);
  CHECK(out.slots_used == 5);
}

TEST_CASE("single agent terminates near the central solution") {
  const auto inst = build_nonconvex_llp_instance();
  const std::vector<double> eps{0.1};
  const auto cuts = same_cuts(1, {1.0});
  DpgConfig cfg;
  const auto out = run_dpg(inst, eps, cuts, single_node(), cfg);
  REQUIRE(out.solved());
  const Vec ref = centralized_oracle(inst, eps, cuts);
  CHECK((out.x[0] - ref).norm() <= 2e-2);
}
