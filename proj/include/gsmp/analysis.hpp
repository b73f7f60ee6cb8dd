#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsmp/configuration.hpp"
#include "gsmp/model.hpp"
#include "gsmp/region.hpp"

namespace gsmp {

// f causes g: some positive-probability transition whose occurring set
// contains the fixed-delay event f newly schedules the fixed-delay event g.
struct CausesRelation {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // sorted unique

  bool contains(std::uint32_t f, std::uint32_t g) const;
};

CausesRelation causes_relation(const GsmpModel& model);

struct TickingVerdict {
  bool single_ticking = false;
  std::optional<std::uint32_t> ticking_event;      // none when there are no fixed events
  std::vector<std::uint32_t> order;                // witness total order when accepted
  std::vector<std::pair<std::uint32_t, std::uint32_t>> violation;  // cycle or two self-loops
};

// Accepts iff the causes relation admits a strict total order on the
// fixed-delay events whose least element carries the only self-loop.
TickingVerdict single_ticking_check(const GsmpModel& model);

// All pairs over {0} union the scheduled elapsed times have fractional
// parts that are equal or farther than delta apart. `circular` measures the
// distance around the unit circle; the literal reading uses |fr(x) - fr(y)|.
bool is_delta_separated(const GsmpModel& model, const Configuration& cfg, double delta,
                        bool circular = true);

struct AnalysisReport {
  TickingVerdict verdict;
  bool guarantee = false;  // long-run frequencies almost surely well-defined
  RegionGraph graph;       // labeled
  int period = 0;
  std::string summary;     // human-readable verdict text

  std::string to_json(const GsmpModel& model) const;
  std::string to_text(const GsmpModel& model) const;
};

// Region graph + BSCC decomposition + ticking classification. When the
// verdict is negative the report flags estimation output as diagnostic-only.
AnalysisReport classify(const GsmpModel& model);

}  // namespace gsmp
