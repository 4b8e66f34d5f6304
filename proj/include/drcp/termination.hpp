#pragma once

#include <span>

namespace drcp {

/// Four-field message exchanged between slots: the detection counter h and
/// the run lengths of the consensus, displacement and value conditions.
/// Shared by the DPG stopping protocol (h1, e1, e2, e3) and the candidate
/// check of the outer loop (h2, e4, e5, e6).
struct TerminationCounters {
  int h = 0;
  int consensus = 0;
  int displacement = 0;
  int value = 0;

  int min_field() const;
  friend bool operator==(const TerminationCounters&, const TerminationCounters&) = default;
};

/// Outcome of agent i's checks over its closed in-neighborhood at slot t.
struct LocalChecks {
  bool consensus = false;     // |s_i - s_j| <= tol_a for every in-neighbor j (and i)
  bool displacement = false;  // |s_j(t) - s_j(t-1)| <= tol_b for every j in the neighborhood
  bool value = false;         // |f_j(s_j(t)) - f_j(s_j(t-1))| <= tol_c likewise
};

/// Counters of agent i at t+1:
///   h  <- min over j in N_in(i) + {i} of (h_j, e1_j, e2_j, e3_j), plus one
///   e* <- e*_i + 1 when the matching check holds, else 0
TerminationCounters advance_counters(std::span<const TerminationCounters> counters_at_t,
                                     std::span<const int> closed_in_neighbors, int agent,
                                     const LocalChecks& checks);

/// h >= S * D + 1
inline bool detection_threshold_reached(int h, int window, int diameter) {
  return h >= window * diameter + 1;
}

}  // namespace drcp
