#include "drcp/projection.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace drcp;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

ConvexFunction disc(double cx, double cy) { return testing::quadratic(Mat::Identity(2, 2), v2(cx, cy)); }

}  // namespace

TEST_CASE("box projection clips") {
  const BoxSet b(v2(-1, -1), v2(1, 1));
  CHECK(project_box(v2(3, 0.5), b) == v2(1, 0.5));
  CHECK(project_box(v2(-4, -4), b) == v2(-1, -1));
  CHECK(project_box(v2(0.2, 0.3), b) == v2(0.2, 0.3));
}

TEST_CASE("sublevel projection") {
  CHECK((project_sublevel(v2(2, 0), disc(0, 0), 1.0) - v2(1, 0)).norm() < 1e-9);
  CHECK(project_sublevel(v2(0.1, 0.2), disc(0, 0), 1.0) == v2(0.1, 0.2));

  ConvexFunction half;
  half.eval = [](const Vec& z) { return z(0) + z(1); };
  half.subgradient = [](const Vec&) { return v2(1, 1); };
  CHECK((project_sublevel(v2(0, 0), half, 0.0) - v2(0, 0)).norm() < 1e-12);
  CHECK((project_sublevel(v2(1, 1), half, 0.0) - v2(0, 0)).norm() < 1e-9);

  // Unit disc around (-0.75, 0).
  const Vec z = project_sublevel(v2(0, 2), disc(-0.75, 0), 1.0);
  CHECK(z(0) == doctest::Approx(-0.39887656).epsilon(1e-7));
  CHECK(z(1) == doctest::Approx(0.93632918).epsilon(1e-7));

  ConvexFunction empty;
  empty.eval = [](const Vec& z) { return z.squaredNorm() + 1.0; };
  empty.subgradient = [](const Vec& z) { return (2.0 * z).eval(); };
  CHECK_THROWS_AS(project_sublevel(v2(1, 1), empty, 0.0), NoConvergence);
}

TEST_CASE("box-restricted sublevel projection") {
  const BoxSet b(v2(-2, -1), v2(2, 1));
  const Vec z = project_box_sublevel(v2(3, 3), disc(0, 0), 4.0, b);
  const Vec ref = project_intersection(v2(3, 3), std::vector{ConvexSetDescriptor::box(b),
                                                             ConvexSetDescriptor::sublevel(disc(0, 0), 4.0)})
                      .point;
  CHECK((z - ref).norm() < 1e-8);
  CHECK(z(1) == doctest::Approx(1.0));
  CHECK(z(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("lens between two unit discs") {
  std::vector<ConvexSetDescriptor> sets{ConvexSetDescriptor::sublevel(disc(-0.75, 0), 1.0),
                                        ConvexSetDescriptor::sublevel(disc(0.75, 0), 1.0)};
  const auto r = project_intersection(v2(0, 2), sets);
  CHECK(std::abs(r.point(0)) < 1e-8);
  CHECK(r.point(1) == doctest::Approx(std::sqrt(7.0) / 4).epsilon(1e-9));
  CHECK(r.residual <= 1e-10);

  const auto inside = project_intersection(v2(0, 0.1), sets);
  CHECK(inside.point == v2(0, 0.1));
  CHECK(inside.residual == 0.0);
}

TEST_CASE("single component matches the direct projection") {
  std::vector<ConvexSetDescriptor> one{ConvexSetDescriptor::sublevel(disc(0.3, -0.2), 0.5)};
  const Vec p = v2(2, 1);
  CHECK((project_intersection(p, one).point - project_sublevel(p, disc(0.3, -0.2), 0.5)).norm() < 1e-10);
}

TEST_CASE("empty intersections are reported") {
  std::vector<ConvexSetDescriptor> apart{ConvexSetDescriptor::sublevel(disc(-2, 0), 1.0),
                                         ConvexSetDescriptor::sublevel(disc(2, 0), 1.0)};
  ProjectionOptions opts;
  opts.max_sweeps = 200;
  CHECK_THROWS_AS(project_intersection(v2(0, 1), apart, opts), EmptyIntersectionSuspected);

  std::vector<ConvexSetDescriptor> boxes{ConvexSetDescriptor::box(BoxSet(v2(0, 0), v2(1, 1))),
                                         ConvexSetDescriptor::box(BoxSet(v2(2, 2), v2(3, 3)))};
  CHECK_THROWS_AS(project_intersection(v2(0, 0), boxes), EmptyIntersectionSuspected);
}

TEST_CASE("feasibility probe") {
  const BoxSet b(v2(-2, -2), v2(2, 2));
  std::vector<ConvexSetDescriptor> lens{ConvexSetDescriptor::box(b),
                                        ConvexSetDescriptor::sublevel(disc(-0.75, 0), 1.0),
                                        ConvexSetDescriptor::sublevel(disc(0.75, 0), 1.0)};
  const auto ok = feasibility_probe(lens);
  CHECK(ok.interior());
  CHECK(ok.max_violation < 0.0);

  std::vector<ConvexSetDescriptor> apart{ConvexSetDescriptor::box(b),
                                         ConvexSetDescriptor::sublevel(disc(-1.5, 0), 1.0),
                                         ConvexSetDescriptor::sublevel(disc(1.5, 0), 1.0)};
  const auto bad = feasibility_probe(apart);
  CHECK_FALSE(bad.interior());
  CHECK(bad.max_violation > 0.0);
}

TEST_CASE("random planar instances: grid oracle, idempotence, non-expansiveness") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> far(-3.0, 3.0);
  const ProjectionOptions opts;
  for (int trial = 0; trial < 8; ++trial) {
    const auto inst = testing::random_planar_instance(rng);
    const Vec p = v2(far(rng), far(rng));
    const auto r = project_intersection(p, inst.sets, opts);
    CHECK(r.residual <= opts.tol);
    const Vec g = testing::grid_projection(inst, p);
    const double dz = (r.point - p).norm(), dg = (g - p).norm();
    CHECK(dz <= dg + 1e-9);
    CHECK(dg - dz <= 2e-3);
    // |g - z|^2 <= |p - g|^2 - |p - z|^2 for every feasible g
    CHECK((g - r.point).norm() <= std::sqrt(std::max(0.0, dg * dg - dz * dz)) + 1e-6);

    const auto again = project_intersection(r.point, inst.sets, opts);
    CHECK((again.point - r.point).norm() < opts.tol);

    for (int pair = 0; pair < 20; ++pair) {
      const Vec a = v2(far(rng), far(rng)), b = v2(far(rng), far(rng));
      const Vec pa = project_intersection(a, inst.sets, opts).point;
      const Vec pb = project_intersection(b, inst.sets, opts).point;
      CHECK((pa - pb).norm() <= (a - b).norm() + 2 * opts.tol);
    }
  }
}
