#pragma once

#include "drcp/network.hpp"
#include "drcp/problem.hpp"
#include "drcp/projection.hpp"
#include "drcp/termination.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace drcp {

/// Joint per-agent variable theta = (x, u) in R^n x R^m.
struct EpigraphState {
  Vec x;
  Vec u;

  Vec joined() const;
  static EpigraphState split(const Vec& theta, int n);
};

using DpgTerminationCounters = TerminationCounters;

/// Approximated problem at one outer iteration in epigraph form: minimize
/// c^T theta over the intersection of the per-agent sets Omega_i.
struct EpigraphProblem {
  int m = 0;
  int n = 0;
  Vec cost_direction;  // (0_n, 1_m / m)
  BoxSet theta_box;    // X x [u_lo, u_hi]^m
  std::vector<std::vector<ConvexSetDescriptor>> local_sets;
};

struct UBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Range for the epigraph variables: min/max of every f_i over 1000 Halton
/// points of the box, widened by 10 on each side.
UBounds epigraph_u_bounds(const ProblemInstance& inst);

/// Omega_i = Theta  ∩ {f_i(x) - u_i <= 0}  ∩  {g_i(x, y) <= -eps_i : y in cuts_i}.
EpigraphProblem build_epigraph_problem(const ProblemInstance& inst, std::span<const double> eps,
                                       std::span<const std::vector<double>> cuts);

/// theta_i(0): x at the box center and u_j = f_j(center).
Vec initial_theta(const ProblemInstance& inst);

/// alpha0 / sqrt(t + 1)
double stepsize(std::int64_t t, double alpha0);

/// P_Omega[ sum_j a_ij theta_j - alpha c ]. `weights[k]` pairs with `neighbor_states[k]`.
Vec dpg_step(std::span<const Vec> neighbor_states, std::span<const double> weights, double alpha,
             const Vec& cost_direction, std::span<const ConvexSetDescriptor> omega,
             const ProjectionOptions& opts = {});

struct DpgTolerances {
  double consensus = 1e-2;     // eps1
  double displacement = 1e-6;  // eps2
  double value = 1e-6;         // eps3
};

/// Counters of agent i at t+1 from slot-t states. `previous_states` is empty
/// at t = 0; the displacement and value checks then fail.
DpgTerminationCounters update_dpg_counters(int agent, std::span<const int> closed_in_neighbors,
                                           std::span<const DpgTerminationCounters> counters,
                                           std::span<const Vec> states,
                                           std::span<const Vec> previous_states,
                                           const ProblemInstance& inst, const DpgTolerances& tol);

/// True iff some agent's h reached S * D + 1.
bool dpg_global_stop(std::span<const DpgTerminationCounters> counters, int window, int diameter);

/// Step-size weighted running average of one agent's states.
class AveragedIterate {
 public:
  void add(const Vec& theta, double alpha);
  Vec value() const { return weighted_sum_ / weight_; }
  bool empty() const { return weight_ == 0.0; }

 private:
  Vec weighted_sum_;
  double weight_ = 0.0;
};

struct DpgConfig {
  DpgTolerances tol;
  double alpha0 = 1.0;
  std::int64_t slot_cap = 100000;
  int diameter = 0;  // D; 0 means derive from the schedule
  bool detect_termination = true;
  ProjectionOptions projection;
  double probe_margin = 1e-8;
  // Polled once per slot; returning true stops the run with Reason::Cancelled.
  std::function<bool()> cancelled;
};

/// Snapshot handed to an observer after each slot.
struct SlotView {
  std::int64_t t = 0;                               // slot of `states`
  std::span<const Vec> states;                      // theta_i(t)
  std::span<const DpgTerminationCounters> counters; // counters at t
  std::span<const AveragedIterate> averages;        // theta-hat_i(t)
};

using SlotObserver = std::function<void(const SlotView&)>;

struct DpgOutcome {
  enum class Verdict { Solved, Unsolvable };
  enum class Reason { None, LocalSetEmpty, SlotCapReached, Cancelled };

  Verdict verdict = Verdict::Unsolvable;
  Reason reason = Reason::None;
  std::vector<Vec> x;      // per-agent decision at the last slot
  std::vector<Vec> theta;  // per-agent joint state at the last slot
  std::vector<Vec> averaged;
  std::int64_t slots_used = 0;
  int empty_agent = -1;    // first agent whose local set looked empty

  bool solved() const { return verdict == Verdict::Solved; }
};

const char* to_string(DpgOutcome::Reason reason);

/// Round-synchronous DPG on the approximated problem with finite-time
/// termination. Verdict-valued; projection failures mid-run are reported as
/// LocalSetEmpty for the failing agent.
DpgOutcome run_dpg(const ProblemInstance& inst, std::span<const double> eps,
                   std::span<const std::vector<double>> cuts, const GraphSchedule& sched,
                   const DpgConfig& cfg, const SlotObserver& observer = {});

/// Resolves D: the configured override if positive, else union_diameter(sched, S),
/// clamped to at least 1.
int resolve_diameter(const GraphSchedule& sched, int configured);

}  // namespace drcp
