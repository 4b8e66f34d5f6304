#include "drcp/network.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace drcp {

namespace {

using Adjacency = std::vector<std::vector<int>>;

Adjacency window_union(const GraphSchedule& sched, std::int64_t start, int window) {
  Adjacency out(static_cast<std::size_t>(sched.agents()));
  for (std::int64_t t = start; t < start + window; ++t) {
    for (const Edge& e : sched.edges_at(t)) {
      if (e.from != e.to) out[static_cast<std::size_t>(e.from)].push_back(e.to);
    }
  }
  for (auto& row : out) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return out;
}

// Hop distances from `src`; -1 for unreachable.
std::vector<int> bfs(const Adjacency& adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{src};
  dist[static_cast<std::size_t>(src)] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

// Diameter of the union graph, or -1 when it is not strongly connected.
int diameter(const Adjacency& adj) {
  int diam = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    for (int d : bfs(adj, static_cast<int>(s))) {
      if (d < 0) return -1;
      diam = std::max(diam, d);
    }
  }
  return diam;
}

}  // namespace

GraphSchedule::GraphSchedule(int agents, std::vector<std::vector<Edge>> edge_sets, int window)
    : agents_(agents), window_(window), edge_sets_(std::move(edge_sets)) {
  if (agents_ <= 0) throw std::invalid_argument("GraphSchedule: agent count must be positive");
  if (edge_sets_.empty()) throw std::invalid_argument("GraphSchedule: period must be positive");
  if (window_ < 1) throw std::invalid_argument("GraphSchedule: window S must be >= 1");

  in_closed_.resize(edge_sets_.size());
  for (std::size_t s = 0; s < edge_sets_.size(); ++s) {
    auto& edges = edge_sets_[s];
    for (const Edge& e : edges) {
      if (e.from < 0 || e.from >= agents_ || e.to < 0 || e.to >= agents_) {
        throw std::invalid_argument("GraphSchedule: edge " + std::to_string(e.from) + "->" +
                                    std::to_string(e.to) + " out of range in slot " +
                                    std::to_string(s));
      }
    }
    for (int i = 0; i < agents_; ++i) {
      const bool has_loop =
          std::any_of(edges.begin(), edges.end(), [i](const Edge& e) { return e.from == i && e.to == i; });
      if (!has_loop) edges.push_back({i, i});
    }
    auto& lists = in_closed_[s];
    lists.assign(static_cast<std::size_t>(agents_), {});
    for (const Edge& e : edges) lists[static_cast<std::size_t>(e.to)].push_back(e.from);
    for (auto& l : lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  }
}

WeightMatrix weights_at(const GraphSchedule& sched, std::int64_t t) {
  const int m = sched.agents();
  WeightMatrix a = WeightMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const auto& nbrs = sched.closed_in_neighbors(t, i);
    const double w = 1.0 / static_cast<double>(nbrs.size());
    for (int j : nbrs) a(i, j) = w;
  }
  return a;
}

bool is_ujsc(const GraphSchedule& sched, int window) {
  if (window < 1) throw std::invalid_argument("is_ujsc: window must be >= 1");
  for (int start = 0; start < sched.period(); ++start) {
    if (diameter(window_union(sched, start, window)) < 0) return false;
  }
  return true;
}

int union_diameter(const GraphSchedule& sched, int window) {
  int worst = 0;
  for (int start = 0; start < sched.period(); ++start) {
    const int d = diameter(window_union(sched, start, window));
    if (d < 0) {
      throw NotStronglyConnected("union over window starting at slot " + std::to_string(start) +
                                 " is not strongly connected");
    }
    worst = std::max(worst, d);
  }
  return worst;
}

WeightMatrix matrix_product(const GraphSchedule& sched, std::int64_t s, std::int64_t t) {
  if (s < t) throw std::invalid_argument("matrix_product: requires s >= t");
  WeightMatrix prod = WeightMatrix::Identity(sched.agents(), sched.agents());
  for (std::int64_t k = t; k < s; ++k) prod = weights_at(sched, k) * prod;
  return prod;
}

GraphSchedule default_schedule6() {
  // Slot 0 carries the even links of the ring plus one chord, slot 1 the odd
  // links plus the reverse chord.
  std::vector<std::vector<Edge>> sets{
      {{0, 1}, {2, 3}, {4, 5}, {0, 3}},
      {{1, 2}, {3, 4}, {5, 0}, {3, 0}},
  };
  return GraphSchedule(6, std::move(sets), 2);
}

}  // namespace drcp
