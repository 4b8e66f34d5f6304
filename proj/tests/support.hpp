#pragma once

#include "drcp/network.hpp"
#include "drcp/problem.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

namespace drcp::testing {

inline Vec uniform_point(std::mt19937_64& rng, const BoxSet& box) {
  Vec x(box.dim());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    std::uniform_real_distribution<double> d(box.lower()(k), box.upper()(k));
    x(k) = d(rng);
  }
  return x;
}

inline Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec a = x, b = x;
    a(k) += h;
    b(k) -= h;
    g(k) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

// Random periodic schedule whose S-slot windows are strongly connected: a
// random Hamiltonian cycle is spread over the S slots of each period and
// sprinkled with extra edges.
inline GraphSchedule random_ujsc_schedule(std::mt19937_64& rng, int m, int window) {
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Edge>> sets(static_cast<std::size_t>(window));
  std::uniform_int_distribution<int> slot(0, window - 1);
  std::uniform_int_distribution<int> node(0, m - 1);
  for (int k = 0; k < m; ++k) {
    Edge e{order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>((k + 1) % m)]};
    sets[static_cast<std::size_t>(slot(rng))].push_back(e);
  }
  std::bernoulli_distribution extra(0.5);
  for (auto& s : sets) {
    while (extra(rng)) {
      int a = node(rng), b = node(rng);
      if (a != b) s.push_back({a, b});
    }
  }
  return GraphSchedule(m, std::move(sets), window);
}

}  // namespace drcp::testing

#include "drcp/projection.hpp"

namespace drcp::testing {

inline ConvexFunction quadratic(Mat a, Vec c) {
  ConvexFunction h;
  h.eval = [a, c](const Vec& z) { return (z - c).dot(a * (z - c)); };
  h.subgradient = [a, c](const Vec& z) { return (2.0 * a * (z - c)).eval(); };
  h.hessian = [a](const Vec&) { return (2.0 * a).eval(); };
  return h;
}

struct PlanarInstance {
  BoxSet box;
  std::vector<ConvexSetDescriptor> sets;  // box first, then the sublevel sets
  std::vector<std::pair<ConvexFunction, double>> sublevels;
};

// Box plus 1-3 ellipses sharing an interior point.
inline PlanarInstance random_planar_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), side(0.5, 1.0), pos(0.2, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  const Vec centre = (Vec(2) << u(rng), u(rng)).finished();
  const Vec half = (Vec(2) << side(rng), side(rng)).finished();
  PlanarInstance out{BoxSet(centre - half, centre + half), {}, {}};
  out.sets.push_back(ConvexSetDescriptor::box(out.box));
  const Vec anchor = uniform_point(rng, BoxSet(centre - 0.5 * half, centre + 0.5 * half));
  const int k = count(rng);
  for (int s = 0; s < k; ++s) {
    Mat r(2, 2);
    r << u(rng), u(rng), u(rng), u(rng);
    const Mat a = r * r.transpose() + 0.3 * Mat::Identity(2, 2);
    const Vec c = (Vec(2) << u(rng) * 1.5, u(rng) * 1.5).finished();
    auto h = quadratic(a, c);
    const double level = h(anchor) + pos(rng) * 0.5;
    out.sets.push_back(ConvexSetDescriptor::sublevel(h, level));
    out.sublevels.emplace_back(h, level);
  }
  return out;
}

// Nearest feasible point of a uniform grid with `n` points per side of the box.
inline Vec grid_projection(const PlanarInstance& inst, const Vec& p, int n = 2001) {
  const Vec lo = inst.box.lower(), hi = inst.box.upper();
  double best = std::numeric_limits<double>::infinity();
  Vec arg = lo;
  Vec z(2);
  for (int a = 0; a < n; ++a) {
    z(0) = lo(0) + (hi(0) - lo(0)) * a / (n - 1);
    for (int b = 0; b < n; ++b) {
      z(1) = lo(1) + (hi(1) - lo(1)) * b / (n - 1);
      const double d = (z - p).squaredNorm();
      if (d >= best) continue;
      bool ok = true;
      for (const auto& [h, level] : inst.sublevels) {
        if (h(z) > level) {
          ok = false;
          break;
        }
      }
      if (ok) {
        best = d;
        arg = z;
      }
    }
  }
  return arg;
}

}  // namespace drcp::testing
