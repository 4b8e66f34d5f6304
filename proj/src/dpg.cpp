#include "drcp/dpg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drcp {

namespace {

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

// f(theta.head(n)) - theta[n + agent]
ConvexFunction lift_epigraph(const ConvexFunction& f, int n, int m, int agent) {
  ConvexFunction h;
  const Eigen::Index ui = n + agent;
  h.eval = [f, n, ui](const Vec& theta) { return f(theta.head(n)) - theta[ui]; };
  h.subgradient = [f, n, m, ui](const Vec& theta) -> Vec {
    Vec g = Vec::Zero(n + m);
    g.head(n) = f.subgradient(theta.head(n));
    g[ui] = -1.0;
    return g;
  };
  if (f.hessian) {
    h.hessian = [f, n, m](const Vec& theta) -> Mat {
      Mat hess = Mat::Zero(n + m, n + m);
      hess.topLeftCorner(n, n) = f.hessian(theta.head(n));
      return hess;
    };
  }
  return h;
}

// g(theta.head(n), y)
ConvexFunction lift_constraint(const RobustConstraint& g, double y, int n, int m) {
  ConvexFunction h;
  h.eval = [g, y, n](const Vec& theta) { return g(theta.head(n), y); };
  h.subgradient = [g, y, n, m](const Vec& theta) -> Vec {
    Vec out = Vec::Zero(n + m);
    out.head(n) = g.subgradient_x(theta.head(n), y);
    return out;
  };
  if (g.hessian_x) {
    h.hessian = [g, y, n, m](const Vec& theta) -> Mat {
      Mat hess = Mat::Zero(n + m, n + m);
      hess.topLeftCorner(n, n) = g.hessian_x(theta.head(n), y);
      return hess;
    };
  }
  return h;
}

}  // namespace

Vec EpigraphState::joined() const {
  Vec theta(x.size() + u.size());
  theta << x, u;
  return theta;
}

EpigraphState EpigraphState::split(const Vec& theta, int n) {
  return {theta.head(n), theta.tail(theta.size() - n)};
}

UBounds epigraph_u_bounds(const ProblemInstance& inst) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const Vec& a = inst.box.lower();
  const Vec width = inst.box.upper() - a;
  Vec x(inst.n);
  for (unsigned s = 1; s <= 1000; ++s) {
    for (int k = 0; k < inst.n; ++k) {
      const unsigned base = kPrimes[static_cast<std::size_t>(k) % std::size(kPrimes)];
      x[k] = a[k] + width[k] * radical_inverse(s, base);
    }
    for (const auto& f : inst.costs) {
      const double v = f(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo - 10.0, hi + 10.0};
}

EpigraphProblem build_epigraph_problem(const ProblemInstance& inst, std::span<const double> eps,
                                       std::span<const std::vector<double>> cuts) {
  const int m = inst.m;
  const int n = inst.n;
  if (static_cast<int>(eps.size()) != m || static_cast<int>(cuts.size()) != m) {
    throw std::invalid_argument("build_epigraph_problem: eps and cuts need one entry per agent");
  }
  EpigraphProblem prob;
  prob.m = m;
  prob.n = n;
  prob.cost_direction = Vec::Zero(n + m);
  prob.cost_direction.tail(m).setConstant(1.0 / m);

  const UBounds ub = epigraph_u_bounds(inst);
  Vec lo(n + m);
  Vec hi(n + m);
  lo << inst.box.lower(), Vec::Constant(m, ub.lo);
  hi << inst.box.upper(), Vec::Constant(m, ub.hi);
  prob.theta_box = BoxSet(lo, hi);

  prob.local_sets.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!(eps[idx] > 0.0)) throw std::invalid_argument("build_epigraph_problem: eps must be positive");
    auto& sets = prob.local_sets[idx];
    sets.push_back(ConvexSetDescriptor::box(prob.theta_box));
    sets.push_back(ConvexSetDescriptor::sublevel(lift_epigraph(inst.costs[idx], n, m, i), 0.0));
    for (double y : cuts[idx]) {
      sets.push_back(
          ConvexSetDescriptor::sublevel(lift_constraint(inst.constraints[idx], y, n, m), -eps[idx]));
    }
  }
  return prob;
}

Vec initial_theta(const ProblemInstance& inst) {
  const Vec center = inst.box.center();
  Vec theta(inst.n + inst.m);
  theta.head(inst.n) = center;
  for (int j = 0; j < inst.m; ++j) theta[inst.n + j] = inst.costs[static_cast<std::size_t>(j)](center);
  return theta;
}

double stepsize(std::int64_t t, double alpha0) {
  return alpha0 / std::sqrt(static_cast<double>(t) + 1.0);
}

Vec dpg_step(std::span<const Vec> neighbor_states, std::span<const double> weights, double alpha,
             const Vec& cost_direction, std::span<const ConvexSetDescriptor> omega,
             const ProjectionOptions& opts) {
  Vec mixed = Vec::Zero(cost_direction.size());
  for (std::size_t k = 0; k < neighbor_states.size(); ++k) mixed += weights[k] * neighbor_states[k];
  mixed -= alpha * cost_direction;
  return project_intersection(mixed, omega, opts).point;
}

DpgTerminationCounters update_dpg_counters(int agent, std::span<const int> closed_in_neighbors,
                                           std::span<const DpgTerminationCounters> counters,
                                           std::span<const Vec> states,
                                           std::span<const Vec> previous_states,
                                           const ProblemInstance& inst, const DpgTolerances& tol) {
  const auto& own = states[static_cast<std::size_t>(agent)];
  const bool have_previous = !previous_states.empty();
  LocalChecks checks{true, have_previous, have_previous};
  for (int j : closed_in_neighbors) {
    const auto jj = static_cast<std::size_t>(j);
    if ((own - states[jj]).norm() > tol.consensus) checks.consensus = false;
    if (have_previous) {
      if ((states[jj] - previous_states[jj]).norm() > tol.displacement) checks.displacement = false;
      const auto& f = inst.costs[jj];
      if (std::abs(f(states[jj].head(inst.n)) - f(previous_states[jj].head(inst.n))) > tol.value) {
        checks.value = false;
      }
    }
  }
  return advance_counters(counters, closed_in_neighbors, agent, checks);
}

bool dpg_global_stop(std::span<const DpgTerminationCounters> counters, int window, int diameter) {
  return std::any_of(counters.begin(), counters.end(), [&](const DpgTerminationCounters& c) {
    return detection_threshold_reached(c.h, window, diameter);
  });
}

void AveragedIterate::add(const Vec& theta, double alpha) {
  if (weight_ == 0.0) {
    weighted_sum_ = alpha * theta;
  } else {
    weighted_sum_ += alpha * theta;
  }
  weight_ += alpha;
}

const char* to_string(DpgOutcome::Reason reason) {
  switch (reason) {
    case DpgOutcome::Reason::None: return "none";
    case DpgOutcome::Reason::LocalSetEmpty: return "local_set_empty";
    case DpgOutcome::Reason::SlotCapReached: return "slot_cap_reached";
    case DpgOutcome::Reason::Cancelled: return "cancelled";
  }
  return "unknown";
}

int resolve_diameter(const GraphSchedule& sched, int configured) {
  if (configured > 0) return configured;
  return std::max(1, union_diameter(sched, sched.window()));
}

DpgOutcome run_dpg(const ProblemInstance& inst, std::span<const double> eps,
                   std::span<const std::vector<double>> cuts, const GraphSchedule& sched,
                   const DpgConfig& cfg, const SlotObserver& observer) {
  if (sched.agents() != inst.m) throw std::invalid_argument("run_dpg: schedule and instance disagree on m");
  const EpigraphProblem prob = build_epigraph_problem(inst, eps, cuts);
  const int m = inst.m;
  const int window = sched.window();
  const int diameter = resolve_diameter(sched, cfg.diameter);

  DpgOutcome out;
  for (int i = 0; i < m; ++i) {
    if (!feasibility_probe(prob.local_sets[static_cast<std::size_t>(i)], cfg.probe_margin).interior()) {
      out.reason = DpgOutcome::Reason::LocalSetEmpty;
      out.empty_agent = i;
      return out;
    }
  }

  std::vector<Vec> states(static_cast<std::size_t>(m), initial_theta(inst));
  std::vector<Vec> previous;
  std::vector<Vec> next(static_cast<std::size_t>(m));
  std::vector<DpgTerminationCounters> counters(static_cast<std::size_t>(m));
  std::vector<DpgTerminationCounters> next_counters(static_cast<std::size_t>(m));
  std::vector<AveragedIterate> averages(static_cast<std::size_t>(m));
  std::vector<Vec> gathered;
  std::vector<double> weights;

  auto finish = [&](std::int64_t t) {
    out.slots_used = t;
    out.theta = states;
    out.x.clear();
    out.averaged.clear();
    for (int i = 0; i < m; ++i) {
      out.x.push_back(states[static_cast<std::size_t>(i)].head(inst.n));
      out.averaged.push_back(averages[static_cast<std::size_t>(i)].value());
    }
  };

  for (std::int64_t t = 0;; ++t) {
    const double alpha = stepsize(t, cfg.alpha0);
    for (int i = 0; i < m; ++i) averages[static_cast<std::size_t>(i)].add(states[static_cast<std::size_t>(i)], alpha);
    if (observer) observer(SlotView{t, states, counters, averages});

    if (cfg.detect_termination && dpg_global_stop(counters, window, diameter)) {
      out.verdict = DpgOutcome::Verdict::Solved;
      finish(t);
      return out;
    }
    if (cfg.cancelled && cfg.cancelled()) {
      out.reason = DpgOutcome::Reason::Cancelled;
      finish(t);
      return out;
    }
    if (t >= cfg.slot_cap) {
      out.reason = DpgOutcome::Reason::SlotCapReached;
      finish(t);
      return out;
    }

    for (int i = 0; i < m; ++i) {
      const auto& nbrs = sched.closed_in_neighbors(t, i);
      gathered.clear();
      for (int j : nbrs) gathered.push_back(states[static_cast<std::size_t>(j)]);
      weights.assign(nbrs.size(), 1.0 / static_cast<double>(nbrs.size()));
      try {
        next[static_cast<std::size_t>(i)] = dpg_step(gathered, weights, alpha, prob.cost_direction,
                                                     prob.local_sets[static_cast<std::size_t>(i)],
                                                     cfg.projection);
      } catch (const EmptyIntersectionSuspected& e) {
        out.reason = DpgOutcome::Reason::LocalSetEmpty;
        out.empty_agent = i;
        finish(t);
        return out;
      } catch (const NoConvergence& e) {
        out.reason = DpgOutcome::Reason::LocalSetEmpty;
        out.empty_agent = i;
        finish(t);
        return out;
      }
      next_counters[static_cast<std::size_t>(i)] =
          update_dpg_counters(i, nbrs, counters, states, previous, inst, cfg.tol);
    }
    previous = states;
    states.swap(next);
    counters.swap(next_counters);
  }
}

}  // namespace drcp
