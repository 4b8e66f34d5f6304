#pragma once

#include "drcp/dpg.hpp"
#include "drcp/llp.hpp"

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace drcp {

/// Per-agent outer-loop state.
struct AgentCutState {
  double eps_k = 100.0;
  std::vector<double> cut_set;
  std::optional<Vec> candidate;       // z_i^k; empty means ||z|| = +inf
  std::optional<Vec> prev_candidate;  // z_i^{k-1}
  std::optional<Vec> x_k;             // last ADRCP solution
  TerminationCounters alg2_counters;
};

struct CutEvent {
  enum class Kind { Solvability, Feasibility, Optimality };
  Kind kind = Kind::Solvability;
  int k = 0;
  int agent = -1;  // -1 for Solvability (all agents)
  double y = 0.0;  // cut point for Feasibility
};

const char* to_string(CutEvent::Kind kind);

struct Alg2Tolerances {
  double consensus = 0.1;     // eps4
  double displacement = 0.1;  // eps5
  double value = 0.1;         // eps6
};

struct CuttingSurfaceConfig {
  std::vector<double> eps0{100.0};        // one value for all agents, or one per agent
  double r = 10.0;
  std::vector<std::vector<double>> y0;    // empty: Y_i^0 = {} for all i
  Alg2Tolerances alg2;
  DpgConfig dpg;
  LlpOptions llp;
  int outer_cap = 200;
  double dedupe_tol = 1e-12;
};

struct IterationRecord {
  int k = 0;
  DpgOutcome::Verdict dpg_verdict = DpgOutcome::Verdict::Unsolvable;
  DpgOutcome::Reason dpg_reason = DpgOutcome::Reason::None;
  std::int64_t slots = 0;
  std::vector<double> eps;          // eps_i^k used by this iteration's ADRCP
  std::vector<std::size_t> cut_sizes;
  std::vector<CutEvent> events;
  std::vector<double> llp_at_x;     // g_i^max(x_i^k); empty unless solved
  double objective_sum = 0.0;       // sum_i f_i(z_i^k), +inf while any candidate is unset
  double objective_at_mean = 0.0;   // F(mean of z_i^k), +inf likewise
  double max_residual = 0.0;        // max_i g_i^max(z_i^k) over set candidates, NaN if none
  bool terminated = false;
};

struct CutCounts {
  int solvability = 0;
  int feasibility = 0;
  int optimality = 0;
};

struct RunReport {
  int iterations = 0;
  bool terminated = false;
  CutCounts cut_counts;
  std::vector<IterationRecord> history;
  std::vector<Vec> final_candidates;
  std::vector<double> final_residuals;  // g_i^max(z_i) at the end
  std::vector<std::vector<double>> final_cut_sets;
  std::vector<double> final_eps;
  std::int64_t total_slots = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

class IterationCapExceeded : public std::runtime_error {
 public:
  IterationCapExceeded(const std::string& what, RunReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const RunReport& report() const { return report_; }

 private:
  RunReport report_;
};

class RunCancelled : public std::runtime_error {
 public:
  RunCancelled(const std::string& what, RunReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const RunReport& report() const { return report_; }

 private:
  RunReport report_;
};

/// Initial states from the config (eps0 broadcast when it has one entry).
std::vector<AgentCutState> initial_cut_states(const ProblemInstance& inst, const CuttingSurfaceConfig& cfg);

/// Appends y_max. A near-duplicate (within dedupe_tol) is still appended and
/// reported through the return value.
bool apply_feasibility_cut(AgentCutState& state, double y_max, double dedupe_tol);

void apply_optimality_cut(AgentCutState& state, double r);

void apply_solvability_cut(std::vector<AgentCutState>& states, double r);

/// Runs S*D+1 slots of the h2/e4/e5/e6 recurrences over fixed candidates and
/// reports whether some agent reached h2 >= S*D+1. Conditions that involve an
/// unset candidate are false.
bool algorithm2_check(std::span<const std::optional<Vec>> current,
                      std::span<const std::optional<Vec>> previous, const ProblemInstance& inst,
                      const GraphSchedule& sched, int diameter, const Alg2Tolerances& tol,
                      std::vector<TerminationCounters>* final_counters = nullptr);

/// One k-iteration of the outer loop. Updates `states` in place.
IterationRecord outer_iteration(std::vector<AgentCutState>& states, int k, const ProblemInstance& inst,
                                const GraphSchedule& sched, const CuttingSurfaceConfig& cfg,
                                std::vector<std::string>* warnings = nullptr);

/// Loops outer_iteration until Algorithm 2 fires. Throws IterationCapExceeded
/// after cfg.outer_cap iterations and RunCancelled when the DPG reports a
/// cancellation.
RunReport run(const ProblemInstance& inst, const GraphSchedule& sched, const CuttingSurfaceConfig& cfg,
              const std::function<void(const IterationRecord&)>& on_iteration = {});

}  // namespace drcp
