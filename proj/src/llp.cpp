#include "drcp/llp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace drcp {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct Point {
  double y;
  double v;
};

// Maximizes on [a, b]; returns the best point seen.
Point golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  Point best = fc >= fd ? Point{c, fc} : Point{d, fd};
  // Golden section cannot see below sqrt(eps) in y near a smooth maximum; one
  // parabolic step through a small stencil recovers the vertex.
  const double s = std::max(1e-5 * (1.0 + std::abs(best.y)), tol);
  const double lo = best.y - s;
  const double hi = best.y + s;
  const double flo = f(lo);
  const double fhi = f(hi);
  const double curv = flo - 2.0 * best.v + fhi;
  if (curv < 0.0) {
    const double vertex = best.y + 0.5 * s * (flo - fhi) / curv;
    if (std::abs(vertex - best.y) <= s) {
      const double fv = f(vertex);
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(best.v));
      if (fv >= best.v - slack) best = {vertex, fv};
    }
  }
  return best;
}

}  // namespace

LlpResult solve_llp(const RobustConstraint& g, const Vec& x, const LlpOptions& opts) {
  if (opts.grid_n < 3) throw std::invalid_argument("solve_llp: grid_n must be at least 3");
  const double lo = g.uncertainty.lo;
  const double hi = g.uncertainty.hi;
  if (!(lo <= hi)) throw std::invalid_argument("solve_llp: empty uncertainty interval");

  auto f = [&](double y) { return g(x, std::clamp(y, lo, hi)); };
  const int n = opts.grid_n;
  const double spacing = (hi - lo) / (n - 1);
  std::vector<double> ys(static_cast<std::size_t>(n));
  std::vector<double> vs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ys[k] = k == n - 1 ? hi : lo + spacing * k;
    vs[k] = f(ys[k]);
  }

  Point best{ys[0], vs[0]};
  for (int k = 1; k < n; ++k) {
    if (vs[k] > best.v) best = {ys[k], vs[k]};
  }

  if (spacing > 0.0) {
    std::vector<int> peaks;
    for (int k = 0; k < n; ++k) {
      const bool left = k == 0 || vs[k] >= vs[k - 1];
      const bool right = k == n - 1 || vs[k] >= vs[k + 1];
      if (left && right) peaks.push_back(k);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vs[a] > vs[b]; });
    if (static_cast<int>(peaks.size()) > opts.brackets) peaks.resize(static_cast<std::size_t>(opts.brackets));
    for (int k : peaks) {
      const double a = ys[std::max(k - 1, 0)];
      const double b = ys[std::min(k + 1, n - 1)];
      const Point p = golden_max(f, a, b, opts.refine_tol);
      // Gains at round-off level do not displace a grid point.
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(best.v));
      if (p.v > best.v + slack) best = p;
    }
  }

  LlpResult out;
  out.y_max = std::clamp(best.y, lo, hi);
  out.g_max = g(x, out.y_max);
  const std::optional<double> lip = opts.lipschitz_y ? opts.lipschitz_y : g.lipschitz_y;
  if (lip) out.certified_gap = *lip * spacing / 2.0;
  return out;
}

LlpVerdict feasibility_verdict(const LlpResult& res) {
  if (res.g_max <= 0.0) return {};
  return {LlpVerdict::Kind::Violated, res.y_max};
}

}  // namespace drcp
