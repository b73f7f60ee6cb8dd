#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsmp/analysis.hpp"
#include "gsmp/configuration.hpp"
#include "gsmp/model.hpp"
#include "gsmp/region.hpp"
#include "gsmp/rng.hpp"

namespace gsmp {

struct FrequencyEstimate {
  double value = 0.0;
  double ci_half_width = 0.0;  // at the configured confidence level
  std::uint64_t samples = 0;
  std::string method;  // "monte-carlo" or "grid"
};

// Expected dwell at a configuration: the integral of the joint residual
// survival up to the earliest fixed-delay deadline (the deadline caps it).
double expected_waiting_time(const GsmpModel& model, const Configuration& cfg);

struct ReachOptions {
  std::uint64_t runs = 1000;
  std::uint64_t max_steps = 1 << 16;
  double plateau_tol = 0.005;  // estimate change across the last doubling
  double confidence = 0.95;
  unsigned workers = 1;
};

struct ReachEstimate {
  int bscc = -1;
  double estimate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  std::vector<double> history;  // absorbed fraction at each doubling horizon
  bool plateau = false;
  std::optional<double> fitted_rate;
  Configuration entry;  // first observed entry configuration (for follow-up runs)
  bool has_entry = false;
};

struct ReachReport {
  std::vector<std::uint64_t> horizons;  // 1, 2, 4, ... in steps
  std::vector<ReachEstimate> per_bscc;
  double not_absorbed = 0.0;
  std::uint64_t runs = 0;
  std::uint64_t off_graph_regions = 0;  // float-classification misses, diagnostic
};

// Monte Carlo absorption into bottom components: runs are simulated until
// their region enters a BSCC, horizons double up to max_steps. The absorbed
// fractions plus the not-absorbed remainder sum to one exactly.
ReachReport estimate_reach_probabilities(const GsmpModel& model, const RegionGraph& labeled,
                                         const ReachOptions& options, std::uint64_t seed);

struct FrequencyOptions {
  std::uint64_t steps = 1 << 20;
  double burn_in = 0.1;      // discarded fraction
  int batches = 32;          // batch-means confidence intervals
  double confidence = 0.95;  // two-sided interval level
};

struct FrequencyPair {
  FrequencyEstimate d;
  FrequencyEstimate c;
};

// Long-run visit and time frequencies of the target states along a single
// chain started at `entry` (normally a BSCC entry from reach estimation).
FrequencyPair estimate_bscc_frequencies(const GsmpModel& model, const Configuration& entry,
                                        const std::vector<std::uint32_t>& targets,
                                        const FrequencyOptions& options, RngStream& rng);

struct GridSpec {
  int truncation = 20;        // n: elapsed times kept at most n, cells of width 1/n
  int draws_per_cell = 4096;  // kernel samples per cell center
  int power_iterations = 20000;
  double tolerance = 1e-10;   // L1 change per iteration
  std::size_t max_cells = 200000;
  bool refine4 = false;       // average 4 spread points per cell instead of the center
  unsigned workers = 1;
};

struct GridResult {
  FrequencyEstimate d;
  FrequencyEstimate c;
  std::uint64_t cells = 0;
  double dropped_mass = 0.0;    // one-step probability mass beyond the truncation
  double undefined_mass = 0.0;  // draws from cells outside the defined dynamics
  int iterations = 0;
  double residual = 0.0;
};

// Discretizes {(s, v) : v(e) <= n} into 1/n-cells, estimates the cell-to-cell
// kernel by Monte Carlo draws from each representative and power-iterates
// (with 1/2 damping, which preserves the invariant measure) to the invariant
// vector. Refuses models that are not single-ticking and truncations below B.
GridResult grid_invariant_measure(const GsmpModel& model, const std::vector<std::uint32_t>& targets,
                                  const GridSpec& spec, std::uint64_t seed);

struct GeometricFit {
  double rate = 0.0;  // 0 = converged immediately
  double r2 = 1.0;
};

// Least-squares fit of log |successive differences| over a doubling-horizon
// history; nullopt when the residuals do not decay geometrically.
std::optional<GeometricFit> fit_geometric_rate(const std::vector<double>& history);

// Wilson score interval.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                          double confidence = 0.95);

}  // namespace gsmp
