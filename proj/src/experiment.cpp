#include "gsmp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gsmp/parallel.hpp"
#include "gsmp/region.hpp"
#include "gsmp/simulator.hpp"

#include "json.hpp"

namespace gsmp {

namespace {

std::vector<std::uint32_t> state_ids(const GsmpModel& model,
                                     const std::vector<std::string>& names) {
  std::vector<std::uint32_t> out;
  for (const auto& n : names) out.push_back(*model.state_index(n));
  return out;
}

}  // namespace

OscillationReport oscillation_experiment(const NamedModel& nm, const OscillationOptions& options,
                                         std::uint64_t seed) {
  const GsmpModel& model = nm.model;
  bool producer_consumer = nm.key == "fig1-producer-consumer";
  bool renewal = nm.key == "renewal-2";
  if (!producer_consumer && !renewal)
    throw std::invalid_argument("oscillation experiment expects fig1-producer-consumer or the "
                                "renewal-2 control, got " + nm.key);

  RunOptions run_options;
  std::vector<std::uint32_t> entry, attempt;
  std::uint32_t ev_p = 0, ev_c = 0;
  if (producer_consumer) {
    run_options.max_steps = 1 + 3 * options.horizon_attempts;
    run_options.target_states = state_ids(model, {"Wait1", "Begin1", "Busy1", "Full1"});
    entry = state_ids(model, {"Wait1", "Wait2"});
    attempt = state_ids(model, {"Busy1", "Busy2"});
    ev_p = *model.event_index("p");
    ev_c = *model.event_index("c");
  } else {
    run_options.max_steps = options.horizon_attempts;
    run_options.target_states = state_ids(model, {"s1"});
  }

  OscillationReport report;
  report.model_key = nm.key;
  report.runs = options.runs;
  report.horizon_attempts = options.horizon_attempts;
  report.alpha = options.alpha;
  report.spread_threshold = options.spread_threshold;
  report.per_run.resize(options.runs);

  run_parallel(options.runs, options.workers, [&](std::size_t r) {
    RngStream rng(derive_seed(seed, r));
    PhaseSegmenter segmenter(entry, attempt, ev_p, ev_c);
    RunOptions opts = run_options;
    if (producer_consumer)
      opts.observer = [&](std::uint64_t, EventMask, double, const Configuration& after) {
        segmenter.observe(after);
      };
    Configuration start = initial_configuration(model, rng);
    RunResult res = simulate_run(model, std::move(start), opts, rng);

    OscillationRun& out = report.per_run[r];
    out.final_partial_c = res.stats.partial_c();
    const auto& cps = res.stats.checkpoints;
    std::size_t k = std::min<std::size_t>(options.late_checkpoints, cps.size());
    if (k >= 2) {
      double lo = 2.0, hi = -1.0;
      for (std::size_t i = cps.size() - k; i < cps.size(); ++i) {
        lo = std::min(lo, cps[i].partial_c);
        hi = std::max(hi, cps[i].partial_c);
      }
      out.late_spread = hi - lo;
    }
    if (producer_consumer) {
      auto phases = segmenter.finish();
      out.phases = phases.size();
      std::uint64_t prior = 0;
      for (std::size_t i = 0; i < phases.size(); ++i) {
        if (i >= 1 && prior > 0 &&
            static_cast<double>(phases[i].attempts) >= options.alpha * static_cast<double>(prior))
          out.dominating = true;
        prior += phases[i].attempts;
      }
    }
  });

  std::uint64_t dom = 0, exceed = 0;
  for (const auto& run : report.per_run) {
    if (run.dominating) ++dom;
    if (run.late_spread > options.spread_threshold) ++exceed;
  }
  report.dominating_fraction = static_cast<double>(dom) / static_cast<double>(options.runs);
  report.spread_exceed_fraction = static_cast<double>(exceed) / static_cast<double>(options.runs);
  return report;
}

std::string OscillationReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["experiment"] = "oscillation";
  doc["model"] = model_key;
  doc["runs"] = runs;
  doc["horizon_attempts"] = horizon_attempts;
  doc["alpha"] = alpha;
  doc["spread_threshold"] = spread_threshold;
  doc["dominating_fraction"] = dominating_fraction;
  doc["spread_exceed_fraction"] = spread_exceed_fraction;
  auto runs_json = nlohmann::ordered_json::array();
  for (const auto& r : per_run)
    runs_json.push_back({{"phases", r.phases},
                         {"dominating", r.dominating},
                         {"late_spread", r.late_spread},
                         {"final_partial_c", r.final_partial_c}});
  doc["per_run"] = runs_json;
  return doc.dump(2);
}

std::string OscillationReport::to_text() const {
  std::ostringstream out;
  out << "oscillation on " << model_key << ": " << runs << " runs, horizon " << horizon_attempts
      << " attempts\n";
  out << "  dominating-phase fraction (alpha " << alpha << "): " << dominating_fraction << "\n";
  out << "  late partial_c spread > " << spread_threshold << ": " << spread_exceed_fraction
      << " of runs\n";
  return out.str();
}

SinkPlateauReport sink_plateau_experiment(const NamedModel& nm, const SinkPlateauOptions& options,
                                          std::uint64_t seed) {
  if (nm.key != "fig2-sink")
    throw std::invalid_argument("sink-plateau experiment expects fig2-sink, got " + nm.key);
  const GsmpModel& model = nm.model;
  RegionGraph graph = bscc_decompose(build_region_graph(model));

  ReachOptions reach_options;
  reach_options.runs = options.runs;
  reach_options.workers = options.workers;
  reach_options.plateau_tol = options.plateau_tol;
  std::uint64_t steps = 1;
  while (steps < 3 * options.horizon_attempts + 1) steps *= 2;
  reach_options.max_steps = steps;

  SinkPlateauReport report;
  report.model_key = nm.key;
  report.runs = options.runs;
  report.reach = estimate_reach_probabilities(model, graph, reach_options, seed);

  std::uint32_t sink_state = *model.state_index("Sink");
  for (std::size_t v = 0; v < graph.vertices.size(); ++v)
    if (graph.vertices[v].state == sink_state && graph.bscc_id[v] >= 0)
      report.sink_bscc = graph.bscc_id[v];
  if (report.sink_bscc >= 0) {
    const ReachEstimate& est = report.reach.per_bscc[report.sink_bscc];
    report.estimate = est.estimate;
    report.wilson_low = est.wilson_low;
    report.wilson_high = est.wilson_high;
    report.plateau = est.plateau;
    report.consistent_with_escape = est.estimate <= 0.991;
  }
  return report;
}

std::string SinkPlateauReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["experiment"] = "sink-plateau";
  doc["model"] = model_key;
  doc["runs"] = runs;
  doc["sink_bscc"] = sink_bscc;
  doc["estimate"] = estimate;
  doc["wilson_low"] = wilson_low;
  doc["wilson_high"] = wilson_high;
  doc["plateau"] = plateau;
  doc["consistent_with_escape"] = consistent_with_escape;
  doc["not_absorbed"] = reach.not_absorbed;
  auto horizons = nlohmann::ordered_json::array();
  for (std::uint64_t h : reach.horizons) horizons.push_back(h);
  doc["horizons_steps"] = horizons;
  if (sink_bscc >= 0) {
    auto history = nlohmann::ordered_json::array();
    for (double v : reach.per_bscc[sink_bscc].history) history.push_back(v);
    doc["history"] = history;
    if (reach.per_bscc[sink_bscc].fitted_rate)
      doc["fitted_rate"] = *reach.per_bscc[sink_bscc].fitted_rate;
  }
  doc["note"] = "absorption constants are estimated empirically from the plateau, not derived";
  return doc.dump(2);
}

std::string SinkPlateauReport::to_text() const {
  std::ostringstream out;
  out << "sink-plateau on " << model_key << ": " << runs << " runs\n";
  out << "  reach estimate " << estimate << "  [" << wilson_low << ", " << wilson_high << "] 95%\n";
  out << "  plateau: " << (plateau ? "yes" : "no")
      << ", consistent with a positive escape probability: "
      << (consistent_with_escape ? "yes" : "no") << "\n";
  return out.str();
}

SinkVisitsReport sink_visits_experiment(const NamedModel& nm, std::uint64_t runs,
                                        std::uint64_t horizon_attempts, unsigned workers,
                                        std::uint64_t seed) {
  if (nm.key != "fig2-cycled")
    throw std::invalid_argument("sink-visits experiment expects fig2-cycled, got " + nm.key);
  const GsmpModel& model = nm.model;
  std::uint32_t sink_state = *model.state_index("Sink");
  std::uint32_t ev_p = *model.event_index("p");

  SinkVisitsReport report;
  report.runs = runs;
  report.horizon_attempts = horizon_attempts;
  report.visits.assign(runs, 0);

  run_parallel(runs, workers, [&](std::size_t r) {
    RngStream rng(derive_seed(seed, r));
    Configuration cfg = initial_configuration(model, rng);
    std::uint64_t attempts = 0, visits = 0;
    std::uint64_t step_cap = 3 * horizon_attempts + 8;
    for (std::uint64_t s = 0; s < step_cap && attempts < horizon_attempts; ++s) {
      bool was_sink = cfg.state == sink_state;
      StepOutcome out = advance(model, cfg, rng);
      if ((out.occurring >> ev_p) & 1u) ++attempts;
      if (!was_sink && cfg.state == sink_state) ++visits;
    }
    report.visits[r] = visits;
  });

  std::sort(report.visits.begin(), report.visits.end());
  std::size_t n = report.visits.size();
  if (n > 0)
    report.median = n % 2 ? static_cast<double>(report.visits[n / 2])
                          : 0.5 * static_cast<double>(report.visits[n / 2 - 1] +
                                                      report.visits[n / 2]);
  return report;
}

std::string SinkVisitsReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["experiment"] = "sink-visits";
  doc["runs"] = runs;
  doc["horizon_attempts"] = horizon_attempts;
  doc["median_visits"] = median;
  doc["max_visits"] = visits.empty() ? 0 : visits.back();
  return doc.dump(2);
}

}  // namespace gsmp
