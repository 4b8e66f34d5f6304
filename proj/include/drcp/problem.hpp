#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drcp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Scalar convex function given by value and subgradient callbacks.
///
/// `hessian` is optional. When it is empty, consumers that need curvature
/// (the sublevel projection) differentiate `subgradient` numerically.
struct ConvexFunction {
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> subgradient;
  std::function<Mat(const Vec&)> hessian;

  double operator()(const Vec& x) const { return eval(x); }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double y) const { return lo <= y && y <= hi; }
};

/// g(x, y) with x in R^n and a scalar uncertainty y in a closed interval.
struct RobustConstraint {
  std::function<double(const Vec&, double)> eval;
  std::function<Vec(const Vec&, double)> subgradient_x;
  std::function<Mat(const Vec&, double)> hessian_x;  // optional
  Interval uncertainty;
  // Bound on |dg/dy| over X x Y. Enables a certified gap in the LLP oracle.
  std::optional<double> lipschitz_y;

  double operator()(const Vec& x, double y) const { return eval(x, y); }

  /// The section x -> g(x, y) at a fixed uncertainty value.
  ConvexFunction at(double y) const;
};

class BoxSet {
 public:
  BoxSet() = default;
  BoxSet(Vec lower, Vec upper);

  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  Eigen::Index dim() const { return lower_.size(); }
  Vec center() const { return 0.5 * (lower_ + upper_); }
  bool contains(const Vec& x, double tol = 0.0) const;
  /// Largest componentwise distance outside the box (0 inside).
  double violation(const Vec& x) const;

 private:
  Vec lower_;
  Vec upper_;
};

struct ProblemInstance {
  std::string name;
  int m = 0;
  int n = 0;
  std::vector<ConvexFunction> costs;
  std::vector<RobustConstraint> constraints;
  BoxSet box;

  /// Throws std::invalid_argument when sizes disagree or evaluations are not finite.
  void validate() const;
};

double evaluate_global_objective(const ProblemInstance& inst, const Vec& x);

/// f(x) = ||x - q||^2
ConvexFunction squared_distance(Vec q);

/// Six agents, f_i = ||x - q_i||^2, g_i = (x1 - p_i)^2 + 2 y x2 - y^2 - 1,
/// Y_i = [-1, 1], X = [-2, 2] x [-1, 1].
ProblemInstance build_section5_instance();

/// Single agent, min -x2 over [0,2] x [0,1] subject to
/// x2 + (x1^2 - 2 x1) exp(-x1^2 + y^2 - 2 x1 y) <= 0 for all y in [0, 2].
/// The constraint is nonconvex in y (and in x1), which exercises the LLP oracle.
ProblemInstance build_nonconvex_llp_instance();

/// "section5" or "fig9".
ProblemInstance instance_by_name(std::string_view name);

namespace section5 {
inline constexpr int kAgents = 6;
inline constexpr double kQ[kAgents][2] = {{0, 6}, {0, 0}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
inline constexpr double kP[kAgents] = {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75};
}  // namespace section5

}  // namespace drcp
