#include "drcp/problem.hpp"

#include <cmath>

namespace drcp {

ConvexFunction RobustConstraint::at(double y) const {
  ConvexFunction f;
  f.eval = [g = eval, y](const Vec& x) { return g(x, y); };
  f.subgradient = [d = subgradient_x, y](const Vec& x) { return d(x, y); };
  if (hessian_x) {
    f.hessian = [h = hessian_x, y](const Vec& x) { return h(x, y); };
  }
  return f;
}

BoxSet::BoxSet(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("BoxSet: lower and upper differ in dimension");
  }
  for (Eigen::Index k = 0; k < lower_.size(); ++k) {
    if (!(lower_[k] <= upper_[k])) {
      throw std::invalid_argument("BoxSet: lower > upper at component " + std::to_string(k));
    }
  }
}

bool BoxSet::contains(const Vec& x, double tol) const { return violation(x) <= tol; }

double BoxSet::violation(const Vec& x) const {
  double v = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    v = std::max({v, lower_[k] - x[k], x[k] - upper_[k]});
  }
  return v;
}

void ProblemInstance::validate() const {
  if (m <= 0 || n <= 0) throw std::invalid_argument("ProblemInstance: m and n must be positive");
  if (static_cast<int>(costs.size()) != m || static_cast<int>(constraints.size()) != m) {
    throw std::invalid_argument("ProblemInstance: costs/constraints must have length m");
  }
  if (box.dim() != n) throw std::invalid_argument("ProblemInstance: box dimension != n");
  // Corners, center and a midpoint of each uncertainty interval.
  std::vector<Vec> samples{box.lower(), box.upper(), box.center()};
  for (int i = 0; i < m; ++i) {
    const auto& g = constraints[static_cast<std::size_t>(i)];
    if (!(g.uncertainty.lo <= g.uncertainty.hi)) {
      throw std::invalid_argument("ProblemInstance: empty uncertainty interval for agent " +
                                  std::to_string(i));
    }
    for (const auto& x : samples) {
      const double ys[] = {g.uncertainty.lo, 0.5 * (g.uncertainty.lo + g.uncertainty.hi),
                           g.uncertainty.hi};
      if (!std::isfinite(costs[static_cast<std::size_t>(i)](x))) {
        throw std::invalid_argument("ProblemInstance: non-finite cost for agent " + std::to_string(i));
      }
      for (double y : ys) {
        if (!std::isfinite(g(x, y))) {
          throw std::invalid_argument("ProblemInstance: non-finite constraint for agent " +
                                      std::to_string(i));
        }
      }
    }
  }
}

double evaluate_global_objective(const ProblemInstance& inst, const Vec& x) {
  double total = 0.0;
  for (const auto& f : inst.costs) total += f(x);
  return total;
}

ConvexFunction squared_distance(Vec q) {
  ConvexFunction f;
  f.eval = [q](const Vec& x) { return (x - q).squaredNorm(); };
  f.subgradient = [q](const Vec& x) -> Vec { return 2.0 * (x - q); };
  f.hessian = [n = q.size()](const Vec&) -> Mat { return 2.0 * Mat::Identity(n, n); };
  return f;
}

ProblemInstance build_section5_instance() {
  using namespace section5;
  ProblemInstance inst;
  inst.name = "section5";
  inst.m = kAgents;
  inst.n = 2;
  inst.box = BoxSet(Vec{{-2.0, -1.0}}, Vec{{2.0, 1.0}});
  for (int i = 0; i < kAgents; ++i) {
    inst.costs.push_back(squared_distance(Vec{{kQ[i][0], kQ[i][1]}}));

    const double p = kP[i];
    RobustConstraint g;
    g.eval = [p](const Vec& x, double y) {
      const double d = x[0] - p;
      return d * d + 2.0 * y * x[1] - y * y - 1.0;
    };
    g.subgradient_x = [p](const Vec& x, double y) -> Vec { return Vec{{2.0 * (x[0] - p), 2.0 * y}}; };
    g.hessian_x = [](const Vec&, double) -> Mat { return Mat{{2.0, 0.0}, {0.0, 0.0}}; };
    g.uncertainty = {-1.0, 1.0};
    // |dg/dy| = |2 x2 - 2 y| <= 4 on X x Y.
    g.lipschitz_y = 4.0;
    inst.constraints.push_back(std::move(g));
  }
  return inst;
}

ProblemInstance build_nonconvex_llp_instance() {
  ProblemInstance inst;
  inst.name = "fig9";
  inst.m = 1;
  inst.n = 2;
  inst.box = BoxSet(Vec{{0.0, 0.0}}, Vec{{2.0, 1.0}});

  ConvexFunction f;
  f.eval = [](const Vec& x) { return -x[1]; };
  f.subgradient = [](const Vec&) -> Vec { return Vec{{0.0, -1.0}}; };
  f.hessian = [](const Vec&) -> Mat { return Mat::Zero(2, 2); };
  inst.costs.push_back(std::move(f));

  RobustConstraint g;
  g.eval = [](const Vec& x, double y) {
    const double a = x[0];
    return x[1] + (a * a - 2.0 * a) * std::exp(-a * a + y * y - 2.0 * a * y);
  };
  g.subgradient_x = [](const Vec& x, double y) -> Vec {
    const double a = x[0];
    const double e = std::exp(-a * a + y * y - 2.0 * a * y);
    const double poly = a * a - 2.0 * a;
    // d/da [poly * e] = (2a - 2) e + poly * (-2a - 2y) e
    return Vec{{((2.0 * a - 2.0) + poly * (-2.0 * a - 2.0 * y)) * e, 1.0}};
  };
  g.uncertainty = {0.0, 2.0};
  // |dg/dy| = |poly| |2y - 2a| e <= 1 * 4 * e^4 on [0,2]^2.
  g.lipschitz_y = 4.0 * std::exp(4.0);
  inst.constraints.push_back(std::move(g));
  return inst;
}

ProblemInstance instance_by_name(std::string_view name) {
  if (name == "section5") return build_section5_instance();
  if (name == "fig9") return build_nonconvex_llp_instance();
  throw std::invalid_argument("unknown instance '" + std::string(name) + "'");
}

}  // namespace drcp
