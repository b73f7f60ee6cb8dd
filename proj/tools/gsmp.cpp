// Command-line front end: model validation and inspection, exact region
// graphs, simulation, frequency estimation, and the stability experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsmp/analysis.hpp"
#include "gsmp/estimate.hpp"
#include "gsmp/experiment.hpp"
#include "gsmp/library.hpp"
#include "gsmp/model_io.hpp"
#include "gsmp/simulator.hpp"

using namespace gsmp;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;    // parse or validation failure
constexpr int kExitRefused = 2;    // guarantee refused and warnings are errors

struct ModelSource {
  std::string spec;      // as given on the command line
  ModelParts parts;
  GsmpModel model;
  bool from_catalog = false;
};

ModelSource load_model(const std::string& spec) {
  ModelSource src;
  src.spec = spec;
  if (std::filesystem::exists(spec)) {
    src.parts = parse_model_file(spec);
    auto issues = validate_model(src.parts);
    if (!issues.empty()) {
      std::string msg = "model '" + spec + "' is invalid:";
      for (const auto& i : issues) msg += "\n  " + i.what;
      throw std::runtime_error(msg);
    }
    src.model = GsmpModel::compile(src.parts);
  } else {
    const NamedModel& nm = get_model(spec);  // throws for unknown keys
    src.parts = nm.parts;
    src.model = nm.model;
    src.from_catalog = true;
  }
  return src;
}

std::vector<std::uint32_t> resolve_states(const GsmpModel& model, const std::string& csv) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string name = csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? csv.size() + 1 : comma + 1;
    if (name.empty()) continue;
    auto s = model.state_index(name);
    if (!s) throw std::runtime_error("unknown target state '" + name + "'");
    out.push_back(*s);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

ordered_json estimate_to_json(const FrequencyEstimate& est) {
  return ordered_json{{"value", est.value},
                      {"ci_half_width", est.ci_half_width},
                      {"samples", est.samples},
                      {"method", est.method}};
}

int cmd_validate(const std::string& model_spec, bool info) {
  ModelSource src = load_model(model_spec);
  const GsmpModel& m = src.model;
  std::cout << "model " << src.spec << ": " << m.state_count() << " states, "
            << m.event_count() << " events, B = " << m.bound_b() << "\n";
  if (info) {
    std::cout << "events:\n";
    for (std::uint32_t e = 0; e < m.event_count(); ++e) {
      const EventSpec& ev = m.event(e);
      std::cout << "  " << ev.name << "  " << delay_kind_name(ev.law.kind) << "  lower "
                << ev.law.lower << "  upper "
                << (ev.law.upper ? std::to_string(*ev.law.upper) : std::string("inf"))
                << "  mean " << mean_delay(ev.law) << "\n";
    }
    std::cout << "schedule:\n";
    for (std::uint32_t s = 0; s < m.state_count(); ++s) {
      std::cout << "  " << m.state_name(s) << ":";
      for (std::uint32_t e : m.scheduled_events(s)) std::cout << " " << m.event(e).name;
      std::cout << "\n";
    }
  }
  // successor totality over the reachable regions
  try {
    RegionGraph graph = build_region_graph(m);
    std::cout << "successor rows cover all " << graph.vertices.size()
              << " reachable regions\n";
  } catch (const MissingSuccessorRow& e) {
    std::cout << "validation failed:\n" << e.what() << "\n";
    return kExitInvalid;
  }
  std::cout << "ok\n";
  return kExitOk;
}

int cmd_regions(const std::string& model_spec, const std::string& dot_path,
                const std::string& out_path) {
  ModelSource src = load_model(model_spec);
  RegionGraph graph = bscc_decompose(build_region_graph(src.model));
  std::cout << "regions: " << graph.vertices.size() << " vertices, " << graph.edge_count()
            << " edges, " << graph.scc_count << " SCCs, " << graph.bscc_count
            << " BSCCs, period " << graph_period(graph) << "\n";
  if (!dot_path.empty()) write_file(dot_path, region_graph_dot(src.model, graph));
  if (!out_path.empty()) write_file(out_path, region_graph_json(src.model, graph));
  return kExitOk;
}

int cmd_check(const std::string& model_spec, const std::string& out_path,
              bool warnings_as_errors) {
  ModelSource src = load_model(model_spec);
  AnalysisReport report = classify(src.model);
  std::cout << report.to_text(src.model);
  if (!out_path.empty()) write_file(out_path, report.to_json(src.model));
  if (!report.guarantee && warnings_as_errors) return kExitRefused;
  return kExitOk;
}

int cmd_simulate(const std::string& model_spec, std::uint64_t seed, std::uint64_t steps,
                 double time_budget, std::uint64_t checkpoint_base, const std::string& targets,
                 const std::string& trace_path, const std::string& checkpoints_path,
                 const std::string& out_path) {
  ModelSource src = load_model(model_spec);
  const GsmpModel& m = src.model;
  RunOptions opts;
  opts.max_steps = steps;
  opts.max_time = time_budget;
  opts.checkpoint_base = checkpoint_base < 2 ? 2 : checkpoint_base;
  opts.target_states = resolve_states(m, targets);
  opts.record_trace = !trace_path.empty();
  RngStream rng(seed);
  RunResult res = simulate_run(m, initial_configuration(m, rng), opts, rng);

  std::cout << "steps " << res.stats.steps << ", partial_d " << res.stats.partial_d()
            << ", partial_c " << res.stats.partial_c() << ", final state "
            << m.state_name(res.final_cfg.state) << "\n";
  if (!trace_path.empty()) write_file(trace_path, trace_csv(m, res.trace));
  if (!checkpoints_path.empty()) write_file(checkpoints_path, checkpoints_csv(res.stats));
  if (!out_path.empty()) {
    ordered_json doc;
    doc["command"] = "simulate";
    doc["model"] = src.spec;
    doc["seed"] = seed;
    doc["steps"] = res.stats.steps;
    doc["target_visits"] = res.stats.target_visits;
    doc["time_total"] = res.stats.time_total;
    doc["time_in_target"] = res.stats.time_in_target;
    doc["partial_d"] = res.stats.partial_d();
    doc["partial_c"] = res.stats.partial_c();
    doc["final_state"] = m.state_name(res.final_cfg.state);
    auto cps = ordered_json::array();
    for (const auto& cp : res.stats.checkpoints)
      cps.push_back({{"step", cp.step}, {"partial_d", cp.partial_d}, {"partial_c", cp.partial_c}});
    doc["checkpoints"] = cps;
    write_file(out_path, doc.dump(2));
  }
  return kExitOk;
}

int cmd_estimate(const std::string& model_spec, std::uint64_t seed, const std::string& method,
                 const std::string& targets, std::uint64_t runs, std::uint64_t horizon,
                 std::uint64_t steps, int grid_n, int draws, double burn_in, int batches,
                 double confidence, bool refine4, unsigned workers, const std::string& out_path,
                 const std::string& history_path, bool warnings_as_errors) {
  ModelSource src = load_model(model_spec);
  const GsmpModel& m = src.model;
  std::vector<std::uint32_t> target_ids = resolve_states(m, targets);
  AnalysisReport analysis = classify(m);

  ordered_json doc;
  doc["command"] = "estimate";
  doc["model"] = src.spec;
  doc["seed"] = seed;
  doc["method"] = method;
  doc["guarantee"] = analysis.guarantee;
  doc["diagnostic_only"] = !analysis.guarantee;
  doc["note"] = "absorption horizons are chosen by plateau detection, not derived constants";

  if (!analysis.guarantee)
    std::cout << "warning: no single-ticking guarantee, estimates are diagnostic-only\n";

  if (method == "grid") {
    if (!analysis.guarantee) {
      std::cout << "grid estimation refused (no invariant-measure guarantee)\n";
      return kExitRefused;
    }
    if (analysis.period > 1)
      std::cout << "warning: region graph has period " << analysis.period
                << "; the damped iteration still converges to the invariant vector\n";
    GridSpec spec;
    spec.truncation = grid_n;
    spec.draws_per_cell = draws;
    spec.refine4 = refine4;
    spec.workers = workers;
    GridResult res = grid_invariant_measure(m, target_ids, spec, seed);
    std::cout << "grid n=" << grid_n << ": d " << res.d.value << ", c " << res.c.value
              << ", cells " << res.cells << ", dropped mass " << res.dropped_mass << "\n";
    doc["grid"] = {{"truncation", grid_n},
                   {"cells", res.cells},
                   {"refine4", refine4},
                   {"dropped_mass", res.dropped_mass},
                   {"undefined_mass", res.undefined_mass},
                   {"iterations", res.iterations},
                   {"residual", res.residual},
                   {"graph_period", analysis.period}};
    doc["d"] = estimate_to_json(res.d);
    doc["c"] = estimate_to_json(res.c);
  } else {
    RegionGraph graph = bscc_decompose(build_region_graph(m));
    ReachOptions ropts;
    ropts.runs = runs;
    ropts.max_steps = horizon;
    ropts.confidence = confidence;
    ropts.workers = workers;
    ReachReport reach = estimate_reach_probabilities(m, graph, ropts, seed);

    auto reach_json = ordered_json::array();
    std::string history_csv = "horizon,bscc,fraction\n";
    for (const auto& est : reach.per_bscc) {
      ordered_json e;
      e["bscc"] = est.bscc;
      e["estimate"] = est.estimate;
      e["wilson_low"] = est.wilson_low;
      e["wilson_high"] = est.wilson_high;
      e["plateau"] = est.plateau;
      if (est.fitted_rate) e["fitted_rate"] = *est.fitted_rate;
      auto hist = ordered_json::array();
      for (double h : est.history) hist.push_back(h);
      e["history"] = hist;
      if (est.has_entry) {
        RngStream rng(derive_seed(seed, 0xF00D + est.bscc));
        FrequencyOptions fopts;
        fopts.steps = steps;
        fopts.burn_in = burn_in;
        fopts.batches = batches;
        fopts.confidence = confidence;
        FrequencyPair fp = estimate_bscc_frequencies(m, est.entry, target_ids, fopts, rng);
        e["d"] = estimate_to_json(fp.d);
        e["c"] = estimate_to_json(fp.c);
        std::cout << "bscc " << est.bscc << ": reach " << est.estimate << " ["
                  << est.wilson_low << ", " << est.wilson_high << "], d " << fp.d.value
                  << " +- " << fp.d.ci_half_width << ", c " << fp.c.value << " +- "
                  << fp.c.ci_half_width << "\n";
      }
      for (std::size_t h = 0; h < reach.horizons.size(); ++h)
        history_csv += std::to_string(reach.horizons[h]) + "," + std::to_string(est.bscc) + "," +
                       std::to_string(est.history[h]) + "\n";
      reach_json.push_back(e);
    }
    std::cout << "not absorbed: " << reach.not_absorbed << "\n";
    doc["reach"] = reach_json;
    doc["not_absorbed"] = reach.not_absorbed;
    auto horizons = ordered_json::array();
    for (std::uint64_t h : reach.horizons) horizons.push_back(h);
    doc["horizons"] = horizons;
    if (!history_path.empty()) write_file(history_path, history_csv);
  }

  if (!out_path.empty()) write_file(out_path, doc.dump(2));
  if (!analysis.guarantee && warnings_as_errors) return kExitRefused;
  return kExitOk;
}

int cmd_experiment(const std::string& name, std::string model_key, std::uint64_t seed,
                   std::uint64_t runs, std::uint64_t horizon, unsigned workers,
                   const std::string& out_path) {
  if (name == "oscillation") {
    if (model_key.empty()) model_key = "fig1-producer-consumer";
    OscillationOptions opts;
    if (runs) opts.runs = runs;
    if (horizon) opts.horizon_attempts = horizon;
    if (model_key == "renewal-2") opts.spread_threshold = 0.01;
    opts.workers = workers;
    OscillationReport rep = oscillation_experiment(get_model(model_key), opts, seed);
    std::cout << rep.to_text();
    if (!out_path.empty()) write_file(out_path, rep.to_json());
    return kExitOk;
  }
  if (name == "sink-plateau") {
    if (model_key.empty()) model_key = "fig2-sink";
    SinkPlateauOptions opts;
    if (runs) opts.runs = runs;
    if (horizon) opts.horizon_attempts = horizon;
    opts.workers = workers;
    SinkPlateauReport rep = sink_plateau_experiment(get_model(model_key), opts, seed);
    std::cout << rep.to_text();
    if (!out_path.empty()) write_file(out_path, rep.to_json());
    return kExitOk;
  }
  if (name == "sink-visits") {
    if (model_key.empty()) model_key = "fig2-cycled";
    SinkVisitsReport rep = sink_visits_experiment(get_model(model_key), runs ? runs : 1000,
                                                  horizon ? horizon : 1 << 16, workers, seed);
    std::cout << "median sink visits: " << rep.median << "\n";
    if (!out_path.empty()) write_file(out_path, rep.to_json());
    return kExitOk;
  }
  throw std::runtime_error("unknown experiment '" + name +
                           "' (expected oscillation, sink-plateau, or sink-visits)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GSMP analysis toolkit: exact region graphs, simulation, and long-run "
               "frequency estimation for generalized semi-Markov processes"};
  app.require_subcommand(1);

  std::string model_spec, targets, out_path, dot_path, trace_path, checkpoints_path, history_path;
  std::string method = "mc", experiment_name, experiment_model;
  std::uint64_t seed = 0, steps = 100000, runs = 0, horizon = 0, checkpoint_base = 2;
  double time_budget = 0.0;
  int grid_n = 20, draws = 4096, batches = 32;
  double burn_in = 0.1, confidence = 0.95;
  unsigned workers = 1;
  bool warnings_as_errors = false, refine4 = false;

  auto* validate = app.add_subcommand("validate", "parse and validate a model");
  validate->add_option("model", model_spec, "model file or catalog key")->required();

  auto* info = app.add_subcommand("info", "validate and print the event and schedule tables");
  info->add_option("model", model_spec)->required();

  auto* regions = app.add_subcommand("regions", "build the region graph");
  regions->add_option("model", model_spec)->required();
  regions->add_option("--dot", dot_path, "write a DOT rendering");
  regions->add_option("--out", out_path, "write the region listing as JSON");

  auto* check = app.add_subcommand("check", "single-ticking verdict and frequency guarantee");
  check->add_option("model", model_spec)->required();
  check->add_option("--out", out_path);
  check->add_flag("--warnings-as-errors", warnings_as_errors);

  auto* simulate = app.add_subcommand("simulate", "simulate one run and report frequencies");
  simulate->add_option("model", model_spec)->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--steps", steps);
  simulate->add_option("--time", time_budget, "stop after this much simulated time");
  simulate->add_option("--checkpoint-base", checkpoint_base, "geometric checkpoint ratio");
  simulate->add_option("--target", targets, "comma-separated target states");
  simulate->add_option("--trace", trace_path, "write the trace CSV");
  simulate->add_option("--checkpoints", checkpoints_path, "write the checkpoint CSV");
  simulate->add_option("--out", out_path);

  auto* estimate = app.add_subcommand("estimate", "estimate reach probabilities and frequencies");
  estimate->add_option("model", model_spec)->required();
  estimate->add_option("--seed", seed)->required();
  estimate->add_option("--method", method)->check(CLI::IsMember({"mc", "grid"}));
  estimate->add_option("--target", targets);
  estimate->add_option("--runs", runs)->default_val(1000);
  estimate->add_option("--horizon", horizon, "reach horizon in steps")->default_val(1 << 14);
  estimate->add_option("--steps", steps, "frequency budget per component")->default_val(1 << 20);
  estimate->add_option("--grid-n", grid_n, "grid truncation and resolution");
  estimate->add_option("--draws", draws, "kernel draws per grid cell");
  estimate->add_option("--burn-in", burn_in);
  estimate->add_option("--batches", batches);
  estimate->add_option("--confidence", confidence, "two-sided interval level");
  estimate->add_flag("--refine4", refine4, "average 4 spread points per grid cell");
  estimate->add_option("--workers", workers);
  estimate->add_option("--out", out_path);
  estimate->add_option("--history", history_path, "write the per-horizon history CSV");
  estimate->add_flag("--warnings-as-errors", warnings_as_errors);

  auto* experiment = app.add_subcommand("experiment", "stability experiments");
  experiment->add_option("name", experiment_name, "oscillation | sink-plateau | sink-visits")
      ->required();
  experiment->add_option("--seed", seed)->required();
  experiment->add_option("--model", experiment_model);
  experiment->add_option("--runs", runs);
  experiment->add_option("--horizon", horizon, "horizon in attempts");
  experiment->add_option("--workers", workers);
  experiment->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(model_spec, false);
    if (app.got_subcommand(info)) return cmd_validate(model_spec, true);
    if (app.got_subcommand(regions)) return cmd_regions(model_spec, dot_path, out_path);
    if (app.got_subcommand(check)) return cmd_check(model_spec, out_path, warnings_as_errors);
    if (app.got_subcommand(simulate))
      return cmd_simulate(model_spec, seed, steps, time_budget, checkpoint_base, targets,
                          trace_path, checkpoints_path, out_path);
    if (app.got_subcommand(estimate))
      return cmd_estimate(model_spec, seed, method, targets, runs, horizon, steps, grid_n, draws,
                          burn_in, batches, confidence, refine4, workers, out_path, history_path,
                          warnings_as_errors);
    if (app.got_subcommand(experiment))
      return cmd_experiment(experiment_name, experiment_model, seed, runs, horizon, workers,
                            out_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
