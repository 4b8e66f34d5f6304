#pragma once

#include "drcp/problem.hpp"

#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace drcp {

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyIntersectionSuspected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// {z : h(z) <= level}
struct Sublevel {
  ConvexFunction h;
  double level = 0.0;
};

struct ConvexSetDescriptor;

struct Intersection {
  std::vector<ConvexSetDescriptor> parts;
};

struct ConvexSetDescriptor {
  std::variant<BoxSet, Sublevel, Intersection> kind;

  static ConvexSetDescriptor box(BoxSet b) { return {std::move(b)}; }
  static ConvexSetDescriptor sublevel(ConvexFunction h, double level) {
    return {Sublevel{std::move(h), level}};
  }
  static ConvexSetDescriptor intersection(std::vector<ConvexSetDescriptor> parts) {
    return {Intersection{std::move(parts)}};
  }
};

struct ProjectionOptions {
  double tol = 1e-10;
  int max_sweeps = 10000;
};

struct ProjectionResult {
  Vec point;
  int iterations = 0;
  double residual = 0.0;  // max constraint violation at `point`
};

/// Max violation of one set at x: box distance for boxes, h(x) - level for
/// sublevel sets, worst part for intersections. Never negative.
double violation(const ConvexSetDescriptor& set, const Vec& x);
double max_violation(std::span<const ConvexSetDescriptor> sets, const Vec& x);

Vec project_box(const Vec& p, const BoxSet& box);

/// Euclidean projection onto {h <= level}.
///
/// Solves the KKT system z + mu * grad h(z) = p with a safeguarded Newton
/// search on the multiplier mu >= 0; each z(mu) comes from a damped Newton
/// solve of min 0.5 |z - p|^2 + mu h(z). Curvature is taken from `h.hessian`
/// when present, else from central differences of the subgradient.
///
/// The result satisfies |h(z) - level| <= tol. Throws NoConvergence when no
/// multiplier brings h down to `level` (empty or ill-conditioned set).
Vec project_sublevel(const Vec& p, const ConvexFunction& h, double level, double tol = 1e-10);

/// Euclidean projection onto {h <= level} within `box`: the same multiplier
/// search with a projected Newton inner solve. Throws NoConvergence when the
/// two sets look disjoint.
Vec project_box_sublevel(const Vec& p, const ConvexFunction& h, double level, const BoxSet& box,
                         double tol = 1e-10);

/// Projection onto one descriptor (nested intersections recurse into Dykstra).
Vec project_onto(const ConvexSetDescriptor& set, const Vec& p, const ProjectionOptions& opts = {});

/// Dykstra's alternating projections with correction terms. Box components
/// are folded into each sublevel component (see project_box_sublevel). Stops
/// once a full sweep moves both the iterate and the corrections by less than
/// `tol` and every component is satisfied within `tol`. Throws EmptyIntersectionSuspected if the residual is still
/// above `tol` after `max_sweeps`.
ProjectionResult project_intersection(const Vec& p, std::span<const ConvexSetDescriptor> sets,
                                      const ProjectionOptions& opts = {});

struct FeasibilityVerdict {
  enum class Kind { InteriorPoint, LikelyEmpty };
  Kind kind = Kind::LikelyEmpty;
  Vec point;                      // best point found
  double max_violation = 0.0;     // max_j h_j(point) - level_j at `point`

  bool interior() const { return kind == Kind::InteriorPoint; }
};

/// Looks for a strictly interior point of the intersection by projected
/// subgradient descent on v(x) = max_j (h_j(x) - level_j) over the box parts,
/// starting from the box center.
FeasibilityVerdict feasibility_probe(std::span<const ConvexSetDescriptor> sets,
                                     double strict_margin = 1e-8, int budget = 20000);

}  // namespace drcp
