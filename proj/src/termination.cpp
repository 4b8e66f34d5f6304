#include "drcp/termination.hpp"

#include <algorithm>

namespace drcp {

int TerminationCounters::min_field() const { return std::min({h, consensus, displacement, value}); }

TerminationCounters advance_counters(std::span<const TerminationCounters> counters_at_t,
                                     std::span<const int> closed_in_neighbors, int agent,
                                     const LocalChecks& checks) {
  const auto& own = counters_at_t[static_cast<std::size_t>(agent)];
  int lowest = own.min_field();
  for (int j : closed_in_neighbors) {
    lowest = std::min(lowest, counters_at_t[static_cast<std::size_t>(j)].min_field());
  }
  TerminationCounters next;
  next.h = lowest + 1;
  next.consensus = checks.consensus ? own.consensus + 1 : 0;
  next.displacement = checks.displacement ? own.displacement + 1 : 0;
  next.value = checks.value ? own.value + 1 : 0;
  return next;
}

}  // namespace drcp
