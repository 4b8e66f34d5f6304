#pragma once

#include "drcp/problem.hpp"

#include <optional>

namespace drcp {

struct LlpOptions {
  int grid_n = 2001;
  double refine_tol = 1e-10;
  int brackets = 5;
  // Overrides RobustConstraint::lipschitz_y when set.
  std::optional<double> lipschitz_y;
};

/// Global maximum of y -> g(x, y) over the constraint's uncertainty interval.
struct LlpResult {
  double g_max = 0.0;
  double y_max = 0.0;
  double certified_gap = -1.0;  // L * spacing / 2, or -1 without a Lipschitz bound

  bool certified() const { return certified_gap >= 0.0; }
};

/// Uniform grid of grid_n points (both endpoints included), then golden-section
/// refinement around the best `brackets` local grid maxima. Ties go to the
/// smallest y.
LlpResult solve_llp(const RobustConstraint& g, const Vec& x, const LlpOptions& opts = {});

struct LlpVerdict {
  enum class Kind { LocallyFeasible, Violated };
  Kind kind = Kind::LocallyFeasible;
  double cut = 0.0;  // y_max when violated

  bool feasible() const { return kind == Kind::LocallyFeasible; }
};

/// LocallyFeasible iff g_max <= 0.
LlpVerdict feasibility_verdict(const LlpResult& res);

}  // namespace drcp
