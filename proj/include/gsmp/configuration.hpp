#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gsmp/model.hpp"
#include "gsmp/rational.hpp"

namespace gsmp {

// Elapsed-time marker for events that are not scheduled in the current state.
inline constexpr double kUnscheduled = -1.0;

// A state plus the elapsed time of every scheduled event, indexed by event
// id. last_step is the dwell of the transition that produced it.
struct Configuration {
  std::uint32_t state = 0;
  std::vector<double> elapsed;
  double last_step = 0.0;

  bool scheduled(std::uint32_t e) const { return elapsed[e] >= 0.0; }

  bool operator==(const Configuration&) const = default;
};

// Exact-valuation variant used by the region machinery.
struct RationalConfiguration {
  std::uint32_t state = 0;
  std::vector<std::optional<Rational>> elapsed;

  bool scheduled(std::uint32_t e) const { return elapsed[e].has_value(); }
};

inline Configuration to_configuration(const RationalConfiguration& rc) {
  Configuration cfg;
  cfg.state = rc.state;
  cfg.elapsed.resize(rc.elapsed.size(), kUnscheduled);
  for (std::size_t e = 0; e < rc.elapsed.size(); ++e)
    if (rc.elapsed[e]) cfg.elapsed[e] = rc.elapsed[e]->to_double();
  return cfg;
}

// Convenience builder for tests and tools: events given by name, the rest
// unscheduled. Throws when a named event is not scheduled in the state.
Configuration make_configuration(const GsmpModel& model, const std::string& state,
                                 const std::vector<std::pair<std::string, double>>& elapsed,
                                 double last_step = 0.0);

}  // namespace gsmp
