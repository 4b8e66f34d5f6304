#include "drcp/projection.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace drcp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

Mat curvature(const ConvexFunction& h, const Vec& z) {
  if (h.hessian) return h.hessian(z);
  const Eigen::Index n = z.size();
  Mat hess(n, n);
  Vec zp = z;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double step = 1e-6 * (1.0 + std::abs(z[k]));
    zp[k] = z[k] + step;
    const Vec up = h.subgradient(zp);
    zp[k] = z[k] - step;
    const Vec down = h.subgradient(zp);
    zp[k] = z[k];
    hess.col(k) = (up - down) / (2.0 * step);
  }
  return 0.5 * (hess + hess.transpose());
}

struct InnerSolution {
  Vec z;
  Vec grad_h;
  double h = 0.0;
  double slope = 0.0;  // -d h(z(mu)) / d mu, restricted to coordinates off the box faces
};

// Coordinates not pinned to a box face by the sign of the gradient.
std::vector<Eigen::Index> free_coordinates(const Vec& z, const Vec& grad, const BoxSet* box) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (box) {
      if (z[k] <= box->lower()[k] && grad[k] > 0.0) continue;
      if (z[k] >= box->upper()[k] && grad[k] < 0.0) continue;
    }
    idx.push_back(k);
  }
  return idx;
}

// argmin_z 0.5 |z - p|^2 + mu h(z) over the box (or all of R^n), projected
// damped Newton from `z`.
InnerSolution solve_penalized(const Vec& p, const ConvexFunction& h, double mu, Vec z, const BoxSet* box) {
  const double scale = 1.0 + p.norm();
  auto merit = [&](const Vec& v, double hv) { return 0.5 * (v - p).squaredNorm() + mu * hv; };
  auto clip = [&](Vec v) { return box ? project_box(v, *box) : v; };
  auto reduced = [](const Vec& v, const std::vector<Eigen::Index>& idx) {
    Vec out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a) out[static_cast<Eigen::Index>(a)] = v[idx[a]];
    return out;
  };
  auto factor = [&](Eigen::LLT<Mat>& llt, const Vec& at, const std::vector<Eigen::Index>& idx) {
    const Mat full = curvature(h, at);
    const auto nf = static_cast<Eigen::Index>(idx.size());
    Mat system(nf, nf);
    for (Eigen::Index a = 0; a < nf; ++a)
      for (Eigen::Index b = 0; b < nf; ++b) system(a, b) = mu * full(idx[a], idx[b]);
    system.diagonal().array() += 1.0;
    llt.compute(system);
  };

  z = clip(std::move(z));
  double hz = h(z);
  Vec gh = h.subgradient(z);
  Eigen::LLT<Mat> llt;
  std::vector<Eigen::Index> idx;
  bool current = false;
  for (int it = 0; it < 100; ++it) {
    const Vec grad = z - p + mu * gh;
    idx = free_coordinates(z, grad, box);
    factor(llt, z, idx);
    current = true;
    const Vec grad_free = reduced(grad, idx);
    if (grad_free.norm() <= 1e-15 * scale * (1.0 + mu)) break;
    const Vec step_free = -llt.solve(grad_free);
    Vec dir = Vec::Zero(z.size());
    for (std::size_t a = 0; a < idx.size(); ++a) dir[idx[a]] = step_free[static_cast<Eigen::Index>(a)];

    double step = 1.0;
    Vec trial = clip(z + dir);
    double htrial = h(trial);
    Vec gtrial = h.subgradient(trial);
    // Full step when it shrinks the gradient; merit decrease resolves nothing
    // once steps are at round-off scale.
    const Vec gnext = trial - p + mu * gtrial;
    const bool full_ok = reduced(gnext, free_coordinates(trial, gnext, box)).norm() < grad_free.norm();
    if (!full_ok) {
      const double start = merit(z, hz);
      while (step > 1e-12) {
        const Vec d = trial - z;
        if (merit(trial, htrial) <= start + 1e-4 * grad.dot(d)) break;
        step *= 0.5;
        trial = clip(z + step * dir);
        htrial = h(trial);
      }
      gtrial = h.subgradient(trial);
    }
    const double moved = (trial - z).norm();
    z = std::move(trial);
    hz = htrial;
    gh = std::move(gtrial);
    current = false;
    if (moved <= 1e-16 * (1.0 + z.norm())) break;
  }
  if (!current) {
    idx = free_coordinates(z, z - p + mu * gh, box);
    factor(llt, z, idx);
  }
  InnerSolution out;
  const Vec gh_free = reduced(gh, idx);
  out.slope = idx.empty() ? 0.0 : gh_free.dot(llt.solve(gh_free));
  out.z = std::move(z);
  out.grad_h = std::move(gh);
  out.h = hz;
  return out;
}

Vec sublevel_projection(const Vec& p, const ConvexFunction& h, double level, double tol, const BoxSet* box) {
  const Vec start = box ? project_box(p, *box) : p;
  const double h0 = h(start);
  if (h0 <= level) return start;

  const Vec g0 = h.subgradient(start);
  const double g0sq = g0.squaredNorm();
  if (g0sq == 0.0) {
    throw NoConvergence("project_sublevel: zero subgradient at an infeasible point");
  }

  double mu_lo = 0.0;
  double mu_hi = std::numeric_limits<double>::infinity();
  double mu = (h0 - level) / g0sq;
  Vec warm = start;
  Vec best_feasible;
  constexpr double kMuCeiling = 1e20;

  for (int it = 0; it < 300; ++it) {
    InnerSolution s = solve_penalized(p, h, mu, warm, box);
    const double r = s.h - level;
    if (std::abs(r) <= tol) return s.z;
    if (r > 0) {
      mu_lo = mu;
    } else {
      mu_hi = mu;
      best_feasible = s.z;
    }
    warm = s.z;

    double next = s.slope > 0 ? mu + r / s.slope : std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(mu_hi)) {
      if (!(next > mu_lo) || !std::isfinite(next)) next = 2.0 * std::max(mu, 1e-300);
      next = std::min(next, 1e3 * std::max(mu, 1e-300));
      if (next > kMuCeiling) {
        throw NoConvergence("project_sublevel: multiplier diverged; sublevel set looks empty");
      }
    } else if (!(next > mu_lo && next < mu_hi)) {
      next = 0.5 * (mu_lo + mu_hi);
    }
    if (!std::isinf(mu_hi) && mu_hi - mu_lo <= 4.0 * std::numeric_limits<double>::epsilon() * mu_hi) {
      return best_feasible;
    }
    mu = next;
  }
  if (best_feasible.size() > 0) return best_feasible;
  throw NoConvergence("project_sublevel: multiplier search exceeded iteration cap");
}

void flatten(const ConvexSetDescriptor& set, std::vector<const BoxSet*>& boxes,
             std::vector<const Sublevel*>& sublevels) {
  std::visit(Overloaded{
                 [&](const BoxSet& b) { boxes.push_back(&b); },
                 [&](const Sublevel& s) { sublevels.push_back(&s); },
                 [&](const Intersection& in) {
                   for (const auto& part : in.parts) flatten(part, boxes, sublevels);
                 },
             },
             set.kind);
}

}  // namespace

double violation(const ConvexSetDescriptor& set, const Vec& x) {
  return std::visit(Overloaded{
                        [&](const BoxSet& b) { return b.violation(x); },
                        [&](const Sublevel& s) { return std::max(0.0, s.h(x) - s.level); },
                        [&](const Intersection& in) { return max_violation(in.parts, x); },
                    },
                    set.kind);
}

double max_violation(std::span<const ConvexSetDescriptor> sets, const Vec& x) {
  double v = 0.0;
  for (const auto& s : sets) v = std::max(v, violation(s, x));
  return v;
}

Vec project_box(const Vec& p, const BoxSet& box) {
  return p.cwiseMax(box.lower()).cwiseMin(box.upper());
}

Vec project_sublevel(const Vec& p, const ConvexFunction& h, double level, double tol) {
  return sublevel_projection(p, h, level, tol, nullptr);
}

Vec project_box_sublevel(const Vec& p, const ConvexFunction& h, double level, const BoxSet& box, double tol) {
  return sublevel_projection(p, h, level, tol, &box);
}

Vec project_onto(const ConvexSetDescriptor& set, const Vec& p, const ProjectionOptions& opts) {
  return std::visit(Overloaded{
                        [&](const BoxSet& b) -> Vec { return project_box(p, b); },
                        [&](const Sublevel& s) -> Vec {
                          return project_sublevel(p, s.h, s.level, 1e-2 * opts.tol);
                        },
                        [&](const Intersection& in) -> Vec {
                          return project_intersection(p, in.parts, opts).point;
                        },
                    },
                    set.kind);
}

ProjectionResult project_intersection(const Vec& p, std::span<const ConvexSetDescriptor> sets,
                                      const ProjectionOptions& opts) {
  ProjectionResult out;
  if (sets.empty()) {
    out.point = p;
    return out;
  }
  if (max_violation(sets, p) == 0.0) {
    out.point = p;
    return out;
  }
  if (sets.size() == 1) {
    out.point = project_onto(sets.front(), p, opts);
    out.iterations = 1;
    out.residual = violation(sets.front(), out.point);
    return out;
  }

  // Direct box children are folded into every sublevel child, whose
  // box-constrained projection is exact; Dykstra then only alternates between
  // the curved pieces.
  std::optional<BoxSet> box;
  std::vector<const Sublevel*> sublevels;
  std::vector<const ConvexSetDescriptor*> others;
  for (const auto& set : sets) {
    if (const auto* b = std::get_if<BoxSet>(&set.kind)) {
      if (!box) {
        box = *b;
      } else {
        const Vec lo = box->lower().cwiseMax(b->lower());
        const Vec hi = box->upper().cwiseMin(b->upper());
        if ((lo.array() > hi.array()).any()) {
          throw EmptyIntersectionSuspected("project_intersection: boxes do not intersect");
        }
        box = BoxSet(lo, hi);
      }
    } else if (const auto* s = std::get_if<Sublevel>(&set.kind)) {
      sublevels.push_back(s);
    } else {
      others.push_back(&set);
    }
  }
  const bool box_alone = box && sublevels.empty();
  const std::size_t count = sublevels.size() + others.size() + (box_alone ? 1 : 0);
  auto project_component = [&](std::size_t k, const Vec& q) -> Vec {
    if (k < sublevels.size()) {
      const Sublevel& s = *sublevels[k];
      return box ? project_box_sublevel(q, s.h, s.level, *box, 1e-2 * opts.tol)
                 : project_sublevel(q, s.h, s.level, 1e-2 * opts.tol);
    }
    k -= sublevels.size();
    if (k < others.size()) return project_onto(*others[k], q, opts);
    return project_box(q, *box);
  };

  if (count == 1) {
    out.point = project_component(0, p);
    out.iterations = 1;
    out.residual = max_violation(sets, out.point);
    return out;
  }

  Vec x = p;
  std::vector<Vec> corrections(count, Vec::Zero(p.size()));
  double residual = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const Vec start = x;
    double correction_change = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const Vec shifted = x + corrections[k];
      x = project_component(k, shifted);
      Vec updated = shifted - x;
      correction_change += (updated - corrections[k]).squaredNorm();
      corrections[k] = std::move(updated);
    }
    if ((x - start).norm() < opts.tol && std::sqrt(correction_change) < opts.tol) {
      residual = max_violation(sets, x);
      if (residual <= opts.tol) {
        out.point = std::move(x);
        out.iterations = sweep;
        out.residual = residual;
        return out;
      }
    }
  }
  residual = max_violation(sets, x);
  if (residual > opts.tol) {
    throw EmptyIntersectionSuspected("project_intersection: residual " + std::to_string(residual) +
                                     " after " + std::to_string(opts.max_sweeps) + " sweeps");
  }
  out.point = std::move(x);
  out.iterations = opts.max_sweeps;
  out.residual = residual;
  return out;
}

FeasibilityVerdict feasibility_probe(std::span<const ConvexSetDescriptor> sets, double strict_margin,
                                     int budget) {
  std::vector<const BoxSet*> boxes;
  std::vector<const Sublevel*> sublevels;
  for (const auto& s : sets) flatten(s, boxes, sublevels);
  if (boxes.empty()) throw std::invalid_argument("feasibility_probe: needs at least one box component");

  Vec lo = boxes.front()->lower();
  Vec hi = boxes.front()->upper();
  for (const BoxSet* b : boxes) {
    lo = lo.cwiseMax(b->lower());
    hi = hi.cwiseMin(b->upper());
  }
  FeasibilityVerdict verdict;
  if ((lo.array() > hi.array()).any()) {
    verdict.point = 0.5 * (lo + hi);
    verdict.max_violation = std::numeric_limits<double>::infinity();
    return verdict;
  }
  const BoxSet domain(lo, hi);

  auto worst = [&](const Vec& x, std::size_t& arg) {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sublevels.size(); ++j) {
      const double vj = sublevels[j]->h(x) - sublevels[j]->level;
      if (vj > v) {
        v = vj;
        arg = j;
      }
    }
    return v;
  };

  Vec x = domain.center();
  std::size_t arg = 0;
  double v = worst(x, arg);
  verdict.point = x;
  verdict.max_violation = v;
  // Polyak steps aimed below the margin.
  const double target = -2.0 * strict_margin;
  for (int k = 0; k < budget && verdict.max_violation >= -strict_margin; ++k) {
    const Vec g = sublevels[arg]->h.subgradient(x);
    const double gsq = g.squaredNorm();
    if (gsq == 0.0) break;
    x = project_box(x - ((v - target) / gsq) * g, domain);
    v = worst(x, arg);
    if (v < verdict.max_violation) {
      verdict.point = x;
      verdict.max_violation = v;
    }
  }
  verdict.kind = verdict.max_violation < -strict_margin ? FeasibilityVerdict::Kind::InteriorPoint
                                                        : FeasibilityVerdict::Kind::LikelyEmpty;
  return verdict;
}

}  // namespace drcp
