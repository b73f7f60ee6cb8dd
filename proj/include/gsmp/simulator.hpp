#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gsmp/configuration.hpp"
#include "gsmp/model.hpp"
#include "gsmp/rng.hpp"

namespace gsmp {

struct StepOutcome {
  EventMask occurring = 0;
  double dwell = 0.0;
};

struct UnspecifiedSuccessor : std::runtime_error {
  UnspecifiedSuccessor(const std::string& what) : std::runtime_error(what) {}
};

// State drawn from the initial distribution, scheduled events at elapsed 0.
Configuration initial_configuration(const GsmpModel& model, RngStream& rng);

// One transition of the underlying Markov chain, advancing cfg in place:
// residual times are drawn for the scheduled variable-delay events, the
// winner is the smallest draw unless a fixed-delay deadline comes first, and
// the valuation is rebuilt by the old/inherited/new classification.
StepOutcome advance(const GsmpModel& model, Configuration& cfg, RngStream& rng);

struct StepResult {
  EventMask occurring = 0;
  double dwell = 0.0;
  Configuration next;
};
StepResult step(const GsmpModel& model, const Configuration& cfg, RngStream& rng);

struct RunStats {
  std::uint64_t steps = 0;
  std::uint64_t target_visits = 0;  // configurations at a target state, counted when left
  double time_total = 0.0;
  double time_in_target = 0.0;

  struct Checkpoint {
    std::uint64_t step;
    double partial_d;
    double partial_c;
  };
  std::vector<Checkpoint> checkpoints;

  double partial_d() const { return steps ? double(target_visits) / double(steps) : 0.0; }
  double partial_c() const { return time_total > 0.0 ? time_in_target / time_total : 0.0; }
};

struct TraceRow {
  std::uint64_t step;
  std::uint32_t state;  // state left by this transition
  EventMask occurring;
  double dwell;
  std::vector<double> elapsed;  // valuation after the transition
  std::uint32_t next_state;
};
using Trace = std::vector<TraceRow>;

struct RunOptions {
  std::uint64_t max_steps = 0;
  double max_time = 0.0;  // stop once this much simulated time has passed (0 = steps only)
  std::vector<std::uint32_t> target_states;
  std::uint64_t checkpoint_base = 2;  // geometric checkpoints 1, b, b^2, ...
  bool record_trace = false;
  // Called after every transition with the updated configuration.
  std::function<void(std::uint64_t step, EventMask occurring, double dwell,
                     const Configuration& after)>
      observer;
};

struct RunResult {
  RunStats stats;
  Configuration final_cfg;
  Trace trace;  // empty unless record_trace
};

RunResult simulate_run(const GsmpModel& model, Configuration start, const RunOptions& options,
                       RngStream& rng);

// fr(elapsed(f) - elapsed(e)), in [0, 1). Both events must be scheduled.
double event_distance(const Configuration& cfg, std::uint32_t e, std::uint32_t f);

struct Phase {
  std::uint64_t attempts = 0;
  double start_distance = 0.0;
  bool strong = false;  // next phase's distance is at most half of this one's
};

// Streaming segmentation of a run into phases: a phase starts at each visit
// of an entry state, its length is the number of attempt-state visits, and
// its distance is fr(elapsed(f) - elapsed(e)) at the first attempt after the
// phase start.
class PhaseSegmenter {
public:
  PhaseSegmenter(std::vector<std::uint32_t> entry_states, std::vector<std::uint32_t> attempt_states,
                 std::uint32_t event_e, std::uint32_t event_f);

  void observe(const Configuration& after);
  std::vector<Phase> finish();  // closes the open phase and fills strong flags

private:
  std::vector<std::uint32_t> entry_;
  std::vector<std::uint32_t> attempt_;
  std::uint32_t e_, f_;
  bool open_ = false;
  bool have_distance_ = false;
  Phase current_{};
  std::vector<Phase> done_;
};

// Same segmentation over a recorded trace.
std::vector<Phase> phase_tracker(const GsmpModel& model, const Trace& trace,
                                 const std::vector<std::uint32_t>& entry_states,
                                 const std::vector<std::uint32_t>& attempt_states,
                                 std::uint32_t event_e, std::uint32_t event_f);

// CSV export: step,dwell,state,occurring,<one column per event>.
std::string trace_csv(const GsmpModel& model, const Trace& trace);
std::string checkpoints_csv(const RunStats& stats);

}  // namespace gsmp
