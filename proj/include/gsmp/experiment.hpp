#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsmp/estimate.hpp"
#include "gsmp/library.hpp"

namespace gsmp {

struct OscillationOptions {
  std::uint64_t runs = 200;
  std::uint64_t horizon_attempts = 100000;
  double alpha = 1.0 / 18.0;     // dominating-phase ratio
  int late_checkpoints = 5;      // spread window (geometric checkpoints)
  double spread_threshold = 0.05;
  unsigned workers = 1;
};

struct OscillationRun {
  std::uint64_t phases = 0;
  bool dominating = false;  // some phase outweighed alpha times everything before it
  double late_spread = 0.0; // max - min of partial_c over the late checkpoints
  double final_partial_c = 0.0;
};

struct OscillationReport {
  std::string model_key;
  std::uint64_t runs = 0;
  std::uint64_t horizon_attempts = 0;
  double alpha = 0.0;
  double spread_threshold = 0.0;
  std::vector<OscillationRun> per_run;
  double dominating_fraction = 0.0;
  double spread_exceed_fraction = 0.0;  // runs with late_spread > threshold

  std::string to_json() const;
  std::string to_text() const;
};

// Long-run frequency stability probe. On the producer-consumer model it
// segments runs into phases at the consumer-waiting states and looks for
// phases that dominate everything before them; on the renewal control it
// only tracks the late checkpoint spread. Any other model is rejected.
OscillationReport oscillation_experiment(const NamedModel& nm, const OscillationOptions& options,
                                         std::uint64_t seed);

struct SinkPlateauOptions {
  std::uint64_t runs = 10000;
  std::uint64_t horizon_attempts = 1 << 16;
  double plateau_tol = 0.005;
  unsigned workers = 1;
};

struct SinkPlateauReport {
  std::string model_key;
  std::uint64_t runs = 0;
  ReachReport reach;
  int sink_bscc = -1;
  double estimate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  bool plateau = false;
  bool consistent_with_escape = false;  // point estimate <= 0.991

  std::string to_json() const;
  std::string to_text() const;
};

// Absorption history of the sink model over doubling horizons; the reach
// probability is expected to level off strictly below one.
SinkPlateauReport sink_plateau_experiment(const NamedModel& nm, const SinkPlateauOptions& options,
                                          std::uint64_t seed);

// Sink visit counts per run on the cycled sink model.
struct SinkVisitsReport {
  std::uint64_t runs = 0;
  std::uint64_t horizon_attempts = 0;
  std::vector<std::uint64_t> visits;  // per run, sorted ascending
  double median = 0.0;

  std::string to_json() const;
};

SinkVisitsReport sink_visits_experiment(const NamedModel& nm, std::uint64_t runs,
                                        std::uint64_t horizon_attempts, unsigned workers,
                                        std::uint64_t seed);

}  // namespace gsmp
