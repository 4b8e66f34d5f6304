#pragma once

#include "drcp/problem.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace drcp {

/// Directed edge: `from` transmits to `to`.
struct Edge {
  int from = 0;
  int to = 0;
};

struct NotStronglyConnected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using WeightMatrix = Mat;

/// Periodic time-varying digraph. Slot t uses edge set t mod period.
/// Self-loops are always present; they are added on construction.
class GraphSchedule {
 public:
  GraphSchedule(int agents, std::vector<std::vector<Edge>> edge_sets, int window);

  int agents() const { return agents_; }
  int period() const { return static_cast<int>(edge_sets_.size()); }
  /// UJSC window length S.
  int window() const { return window_; }

  const std::vector<Edge>& edges_at(std::int64_t t) const { return edge_sets_[slot(t)]; }
  /// In-neighbors of i at slot t, self included, ascending.
  const std::vector<int>& closed_in_neighbors(std::int64_t t, int i) const {
    return in_closed_[slot(t)][static_cast<std::size_t>(i)];
  }

 private:
  std::size_t slot(std::int64_t t) const {
    return static_cast<std::size_t>(t % static_cast<std::int64_t>(edge_sets_.size()));
  }

  int agents_;
  int window_;
  std::vector<std::vector<Edge>> edge_sets_;
  std::vector<std::vector<std::vector<int>>> in_closed_;
};

/// a_ij(t) = 1 / |N_in(i) + {i}| on the closed in-neighborhood, 0 elsewhere.
WeightMatrix weights_at(const GraphSchedule& sched, std::int64_t t);

/// True iff every window [t, t+S) with t in [0, period) has a strongly connected union.
bool is_ujsc(const GraphSchedule& sched, int window);

/// Max over window starts of the diameter of the window's union graph.
/// Throws NotStronglyConnected if some window union is not strongly connected.
int union_diameter(const GraphSchedule& sched, int window);

/// A(s-1) ... A(t); identity when s == t.
WeightMatrix matrix_product(const GraphSchedule& sched, std::int64_t s, std::int64_t t);

/// 2-periodic schedule on six agents. Neither slot alone is strongly connected;
/// the union of consecutive slots is.
GraphSchedule default_schedule6();

}  // namespace drcp
