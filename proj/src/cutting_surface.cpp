#include "drcp/cutting_surface.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace drcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double candidate_residual(const ProblemInstance& inst, int i, const Vec& z, const LlpOptions& llp) {
  return solve_llp(inst.constraints[static_cast<std::size_t>(i)], z, llp).g_max;
}

void fill_objectives(IterationRecord& rec, const std::vector<AgentCutState>& states,
                     const ProblemInstance& inst, const LlpOptions& llp) {
  rec.objective_sum = 0.0;
  Vec mean = Vec::Zero(inst.n);
  bool all_set = true;
  rec.max_residual = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < inst.m; ++i) {
    const auto& z = states[static_cast<std::size_t>(i)].candidate;
    if (!z) {
      all_set = false;
      continue;
    }
    rec.objective_sum += inst.costs[static_cast<std::size_t>(i)](*z);
    mean += *z;
    const double res = candidate_residual(inst, i, *z, llp);
    if (std::isnan(rec.max_residual) || res > rec.max_residual) rec.max_residual = res;
  }
  if (all_set) {
    rec.objective_at_mean = evaluate_global_objective(inst, mean / inst.m);
  } else {
    rec.objective_sum = kInf;
    rec.objective_at_mean = kInf;
  }
}

}  // namespace

const char* to_string(CutEvent::Kind kind) {
  switch (kind) {
    case CutEvent::Kind::Solvability: return "solvability";
    case CutEvent::Kind::Feasibility: return "feasibility";
    case CutEvent::Kind::Optimality: return "optimality";
  }
  return "unknown";
}

std::vector<AgentCutState> initial_cut_states(const ProblemInstance& inst, const CuttingSurfaceConfig& cfg) {
  const auto m = static_cast<std::size_t>(inst.m);
  if (cfg.eps0.size() != 1 && cfg.eps0.size() != m) {
    throw std::invalid_argument("initial_cut_states: eps0 needs 1 or m entries");
  }
  if (!cfg.y0.empty() && cfg.y0.size() != m) {
    throw std::invalid_argument("initial_cut_states: y0 needs m entries");
  }
  std::vector<AgentCutState> states(m);
  for (std::size_t i = 0; i < m; ++i) {
    states[i].eps_k = cfg.eps0.size() == 1 ? cfg.eps0[0] : cfg.eps0[i];
    if (!(states[i].eps_k > 0.0)) throw std::invalid_argument("initial_cut_states: eps0 must be positive");
    if (!cfg.y0.empty()) states[i].cut_set = cfg.y0[i];
  }
  return states;
}

bool apply_feasibility_cut(AgentCutState& state, double y_max, double dedupe_tol) {
  bool duplicate = false;
  for (double y : state.cut_set) {
    if (std::abs(y - y_max) <= dedupe_tol) duplicate = true;
  }
  state.cut_set.push_back(y_max);
  return duplicate;
}

void apply_optimality_cut(AgentCutState& state, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("apply_optimality_cut: r must exceed 1");
  state.eps_k /= r;
}

void apply_solvability_cut(std::vector<AgentCutState>& states, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("apply_solvability_cut: r must exceed 1");
  for (auto& s : states) s.eps_k /= r;
}

bool algorithm2_check(std::span<const std::optional<Vec>> current,
                      std::span<const std::optional<Vec>> previous, const ProblemInstance& inst,
                      const GraphSchedule& sched, int diameter, const Alg2Tolerances& tol,
                      std::vector<TerminationCounters>* final_counters) {
  const int m = sched.agents();
  const int threshold_slots = sched.window() * diameter + 1;
  std::vector<TerminationCounters> counters(static_cast<std::size_t>(m));
  std::vector<TerminationCounters> next(static_cast<std::size_t>(m));

  auto consensus = [&](int i, int j) {
    const auto& zi = current[static_cast<std::size_t>(i)];
    const auto& zj = current[static_cast<std::size_t>(j)];
    return zi && zj && (*zi - *zj).norm() <= tol.consensus;
  };
  auto displacement = [&](int j) {
    const auto& z = current[static_cast<std::size_t>(j)];
    const auto& zp = previous[static_cast<std::size_t>(j)];
    return z && zp && (*z - *zp).norm() <= tol.displacement;
  };
  auto value = [&](int j) {
    const auto& z = current[static_cast<std::size_t>(j)];
    const auto& zp = previous[static_cast<std::size_t>(j)];
    if (!z || !zp) return false;
    const auto& f = inst.costs[static_cast<std::size_t>(j)];
    return std::abs(f(*z) - f(*zp)) <= tol.value;
  };

  for (int t = 0; t < threshold_slots; ++t) {
    for (int i = 0; i < m; ++i) {
      const auto& nbrs = sched.closed_in_neighbors(t, i);
      LocalChecks checks{true, true, true};
      for (int j : nbrs) {
        checks.consensus = checks.consensus && consensus(i, j);
        checks.displacement = checks.displacement && displacement(j);
        checks.value = checks.value && value(j);
      }
      next[static_cast<std::size_t>(i)] = advance_counters(counters, nbrs, i, checks);
    }
    counters.swap(next);
  }
  if (final_counters) *final_counters = counters;
  for (const auto& c : counters) {
    if (detection_threshold_reached(c.h, sched.window(), diameter)) return true;
  }
  return false;
}

IterationRecord outer_iteration(std::vector<AgentCutState>& states, int k, const ProblemInstance& inst,
                                const GraphSchedule& sched, const CuttingSurfaceConfig& cfg,
                                std::vector<std::string>* warnings) {
  const auto m = static_cast<std::size_t>(inst.m);
  IterationRecord rec;
  rec.k = k;
  std::vector<double> eps(m);
  std::vector<std::vector<double>> cuts(m);
  for (std::size_t i = 0; i < m; ++i) {
    eps[i] = states[i].eps_k;
    cuts[i] = states[i].cut_set;
    rec.cut_sizes.push_back(states[i].cut_set.size());
    states[i].prev_candidate = states[i].candidate;
  }
  rec.eps = eps;

  const DpgOutcome dpg = run_dpg(inst, eps, cuts, sched, cfg.dpg);
  rec.dpg_verdict = dpg.verdict;
  rec.dpg_reason = dpg.reason;
  rec.slots = dpg.slots_used;
  if (dpg.reason == DpgOutcome::Reason::Cancelled) return rec;

  if (!dpg.solved()) {
    apply_solvability_cut(states, cfg.r);
    rec.events.push_back({CutEvent::Kind::Solvability, k});
    fill_objectives(rec, states, inst, cfg.llp);
    return rec;
  }

  std::vector<bool> optimality(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    auto& s = states[i];
    s.x_k = dpg.x[i];
    const LlpResult llp = solve_llp(inst.constraints[i], *s.x_k, cfg.llp);
    rec.llp_at_x.push_back(llp.g_max);
    const LlpVerdict verdict = feasibility_verdict(llp);
    if (verdict.feasible()) {
      s.candidate = s.x_k;
      optimality[i] = true;
    } else {
      // z_i^k = z_i^{k-1}: the candidate is left untouched.
      if (apply_feasibility_cut(s, verdict.cut, cfg.dedupe_tol) && warnings) {
        std::ostringstream msg;
        msg << "k=" << k << " agent " << i << ": cut y=" << verdict.cut << " duplicates an existing cut";
        warnings->push_back(msg.str());
      }
      rec.events.push_back({CutEvent::Kind::Feasibility, k, static_cast<int>(i), verdict.cut});
    }
  }

  std::vector<std::optional<Vec>> current(m);
  std::vector<std::optional<Vec>> previous(m);
  for (std::size_t i = 0; i < m; ++i) {
    current[i] = states[i].candidate;
    previous[i] = states[i].prev_candidate;
  }
  std::vector<TerminationCounters> counters;
  const int diameter = resolve_diameter(sched, cfg.dpg.diameter);
  rec.terminated = algorithm2_check(current, previous, inst, sched, diameter, cfg.alg2, &counters);
  for (std::size_t i = 0; i < m; ++i) states[i].alg2_counters = counters[i];

  if (!rec.terminated) {
    for (std::size_t i = 0; i < m; ++i) {
      if (!optimality[i]) continue;
      apply_optimality_cut(states[i], cfg.r);
      rec.events.push_back({CutEvent::Kind::Optimality, k, static_cast<int>(i)});
    }
  }
  fill_objectives(rec, states, inst, cfg.llp);
  return rec;
}

RunReport run(const ProblemInstance& inst, const GraphSchedule& sched, const CuttingSurfaceConfig& cfg,
              const std::function<void(const IterationRecord&)>& on_iteration) {
  if (!(cfg.r > 1.0)) throw std::invalid_argument("run: r must exceed 1");
  const auto started = std::chrono::steady_clock::now();
  std::vector<AgentCutState> states = initial_cut_states(inst, cfg);
  RunReport report;

  auto finalize = [&]() {
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.final_candidates.clear();
    report.final_residuals.clear();
    report.final_cut_sets.clear();
    report.final_eps.clear();
    for (const auto& s : states) {
      report.final_cut_sets.push_back(s.cut_set);
      report.final_eps.push_back(s.eps_k);
    }
    for (int i = 0; i < inst.m; ++i) {
      const auto& z = states[static_cast<std::size_t>(i)].candidate;
      if (z) {
        report.final_candidates.push_back(*z);
        report.final_residuals.push_back(candidate_residual(inst, i, *z, cfg.llp));
      } else {
        report.final_candidates.push_back(Vec::Constant(inst.n, kInf));
        report.final_residuals.push_back(kInf);
      }
    }
  };

  for (int k = 0; k < cfg.outer_cap; ++k) {
    IterationRecord rec = outer_iteration(states, k, inst, sched, cfg, &report.warnings);
    report.total_slots += rec.slots;
    if (rec.dpg_reason == DpgOutcome::Reason::Cancelled) {
      report.iterations = k;
      finalize();
      throw RunCancelled("run: cancelled during iteration " + std::to_string(k), std::move(report));
    }
    for (const auto& e : rec.events) {
      switch (e.kind) {
        case CutEvent::Kind::Solvability: ++report.cut_counts.solvability; break;
        case CutEvent::Kind::Feasibility: ++report.cut_counts.feasibility; break;
        case CutEvent::Kind::Optimality: ++report.cut_counts.optimality; break;
      }
    }
    const bool done = rec.terminated;
    if (on_iteration) on_iteration(rec);
    report.history.push_back(std::move(rec));
    report.iterations = k + 1;
    if (done) {
      report.terminated = true;
      finalize();
      return report;
    }
  }
  finalize();
  throw IterationCapExceeded("run: no termination within " + std::to_string(cfg.outer_cap) + " outer iterations",
                             std::move(report));
}

}  // namespace drcp
