#include "drcp/network.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace drcp;

namespace {

GraphSchedule cycle(int m) {
  std::vector<Edge> e;
  for (int i = 0; i < m; ++i) e.push_back({i, (i + 1) % m});
  return GraphSchedule(m, {e}, 1);
}

}  // namespace

TEST_CASE("weights are uniform over the closed in-neighborhood") {
  GraphSchedule s(4, {{{2, 0}, {3, 0}}}, 1);
  const auto a = weights_at(s, 0);
  CHECK(a(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(a(0, 2) == doctest::Approx(1.0 / 3));
  CHECK(a(0, 3) == doctest::Approx(1.0 / 3));
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 1) == 1.0);
  CHECK(s.closed_in_neighbors(0, 0) == std::vector<int>{0, 2, 3});
}

TEST_CASE("schedule is periodic") {
  const auto s = default_schedule6();
  CHECK(s.period() == 2);
  CHECK(weights_at(s, 0) == weights_at(s, 6));
  CHECK(weights_at(s, 1) == weights_at(s, 7));
  CHECK(weights_at(s, 0) != weights_at(s, 1));
}

TEST_CASE("bad schedules are rejected") {
  CHECK_THROWS_AS(GraphSchedule(3, {{{0, 3}}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(GraphSchedule(3, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(GraphSchedule(3, {{}}, 0), std::invalid_argument);
}

TEST_CASE("joint strong connectivity") {
  const auto s = default_schedule6();
  CHECK_FALSE(is_ujsc(s, 1));
  CHECK(is_ujsc(s, 2));
  CHECK(is_ujsc(cycle(5), 1));
  GraphSchedule unreachable(3, {{{0, 1}, {1, 2}, {2, 1}}}, 1);
  CHECK_FALSE(is_ujsc(unreachable, 1));
}

TEST_CASE("union diameters") {
  CHECK(union_diameter(cycle(6), 1) == 5);
  std::vector<Edge> complete;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) complete.push_back({i, j});
  CHECK(union_diameter(GraphSchedule(5, {complete}, 1), 1) == 1);
  std::vector<Edge> star;
  for (int i = 1; i < 5; ++i) {
    star.push_back({0, i});
    star.push_back({i, 0});
  }
  CHECK(union_diameter(GraphSchedule(5, {star}, 1), 1) == 2);
  CHECK(union_diameter(default_schedule6(), 2) == 4);
  CHECK_THROWS_AS(union_diameter(default_schedule6(), 1), NotStronglyConnected);
}

TEST_CASE("transition matrix products") {
  const auto s = default_schedule6();
  CHECK(matrix_product(s, 3, 3) == Mat::Identity(6, 6));
  const Mat p = matrix_product(s, 2, 0);
  const double row0[] = {4.0 / 9, 0, 1.0 / 9, 1.0 / 9, 1.0 / 6, 1.0 / 6};
  const double row3[] = {1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 0, 0};
  for (int j = 0; j < 6; ++j) {
    CHECK(p(0, j) == doctest::Approx(row0[j]).epsilon(1e-14));
    CHECK(p(3, j) == doctest::Approx(row3[j]).epsilon(1e-14));
  }
  const Mat long_run = matrix_product(s, 200, 0);
  for (int j = 0; j < 6; ++j) {
    CHECK((long_run.col(j).array() - long_run(0, j)).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("random schedules: stochastic weights, diameters and mixing") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3 + trial % 6;
    const int window = 1 + trial % 3;
    const auto s = testing::random_ujsc_schedule(rng, m, window);
    REQUIRE(is_ujsc(s, window));
    const int d = union_diameter(s, window);
    CHECK(d >= 1);
    CHECK(d <= m - 1);
    for (int t = 0; t < s.period(); ++t) {
      const auto a = weights_at(s, t);
      CHECK((a.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
      CHECK(a.minCoeff() >= 0.0);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          if (a(i, j) > 0) CHECK(a(i, j) >= 1.0 / m);
        }
      }
    }
    auto spread = [&](std::int64_t k) {
      const Mat p = matrix_product(s, k, 0);
      double worst = 0;
      for (int j = 0; j < m; ++j) worst = std::max(worst, p.col(j).maxCoeff() - p.col(j).minCoeff());
      return worst;
    };
    CHECK(spread(20 * window * m) <= spread(window * m) + 1e-15);
  }
}
