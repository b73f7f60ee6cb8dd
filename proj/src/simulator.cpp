#include "gsmp/simulator.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gsmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint32_t draw_from(const std::vector<std::pair<std::uint32_t, double>>& dist,
                        RngStream& rng) {
  if (dist.size() == 1) return dist[0].first;
  double q = rng.next_unit();
  double acc = 0.0;
  for (const auto& [value, w] : dist) {
    acc += w;
    if (q < acc) return value;
  }
  return dist.back().first;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Configuration make_configuration(const GsmpModel& model, const std::string& state,
                                 const std::vector<std::pair<std::string, double>>& elapsed,
                                 double last_step) {
  auto s = model.state_index(state);
  if (!s) throw std::invalid_argument("unknown state '" + state + "'");
  Configuration cfg;
  cfg.state = *s;
  cfg.elapsed.assign(model.event_count(), kUnscheduled);
  cfg.last_step = last_step;
  for (std::uint32_t e : model.scheduled_events(*s)) cfg.elapsed[e] = 0.0;
  for (const auto& [name, value] : elapsed) {
    auto e = model.event_index(name);
    if (!e) throw std::invalid_argument("unknown event '" + name + "'");
    if (!model.is_scheduled(*s, *e))
      throw std::invalid_argument("event '" + name + "' is not scheduled in '" + state + "'");
    cfg.elapsed[*e] = value;
  }
  return cfg;
}

Configuration initial_configuration(const GsmpModel& model, RngStream& rng) {
  std::uint32_t s = draw_from(model.init(), rng);
  Configuration cfg;
  cfg.state = s;
  cfg.elapsed.assign(model.event_count(), kUnscheduled);
  cfg.last_step = 0.0;
  for (std::uint32_t e : model.scheduled_events(s)) cfg.elapsed[e] = 0.0;
  return cfg;
}

StepOutcome advance(const GsmpModel& model, Configuration& cfg, RngStream& rng) {
  double best_var = kInf;
  std::uint32_t best_event = ~0u;
  double fixed_u = kInf;
  EventMask fixed_set = 0;

  for (std::uint32_t e : model.scheduled_events(cfg.state)) {
    const DelayLaw& law = model.event(e).law;
    if (law.is_fixed()) {
      double rem = static_cast<double>(*law.upper) - cfg.elapsed[e];
      if (rem <= 0.0) throw std::invalid_argument("fixed-delay event past its deadline");
      if (rem < fixed_u) {
        fixed_u = rem;
        fixed_set = EventMask(1) << e;
      } else if (rem == fixed_u) {
        fixed_set |= EventMask(1) << e;
      }
    } else {
      double r = residual_sample(law, cfg.elapsed[e], rng);
      // variable-delay ties have probability zero; break by event name
      if (r < best_var ||
          (r == best_var && model.lex_rank(e) < model.lex_rank(best_event))) {
        best_var = r;
        best_event = e;
      }
    }
  }

  StepOutcome out;
  if (best_var < fixed_u) {
    out.occurring = EventMask(1) << best_event;
    out.dwell = best_var;
  } else if (fixed_set != 0) {
    // a draw equal to the deadline loses to the fixed-delay set
    out.occurring = fixed_set;
    out.dwell = fixed_u;
  } else {
    throw std::logic_error("no event can occur");
  }

  const GsmpModel::Row* row = model.find_row(cfg.state, out.occurring);
  if (!row)
    throw UnspecifiedSuccessor("unspecified successor: state '" +
                               model.state_name(cfg.state) + "', occurring {" +
                               model.mask_names(out.occurring) + "}");
  std::uint32_t next_state = draw_from(row->targets, rng);

  EventMask next_mask = model.scheduled_mask(next_state);
  for (std::uint32_t e = 0; e < model.event_count(); ++e) {
    EventMask bit = EventMask(1) << e;
    if (!(next_mask & bit)) {
      cfg.elapsed[e] = kUnscheduled;
    } else if (cfg.elapsed[e] >= 0.0 && !(out.occurring & bit)) {
      cfg.elapsed[e] += out.dwell;  // inherited
    } else {
      cfg.elapsed[e] = 0.0;  // new
    }
  }
  cfg.state = next_state;
  cfg.last_step = out.dwell;
  return out;
}

StepResult step(const GsmpModel& model, const Configuration& cfg, RngStream& rng) {
  StepResult result;
  result.next = cfg;
  StepOutcome out = advance(model, result.next, rng);
  result.occurring = out.occurring;
  result.dwell = out.dwell;
  return result;
}

RunResult simulate_run(const GsmpModel& model, Configuration start, const RunOptions& options,
                       RngStream& rng) {
  RunResult result;
  RunStats& stats = result.stats;

  std::vector<char> is_target(model.state_count(), 0);
  for (std::uint32_t s : options.target_states) is_target[s] = 1;

  std::uint64_t next_checkpoint = 1;
  Configuration& cfg = result.final_cfg;
  cfg = std::move(start);

  for (std::uint64_t i = 0; i < options.max_steps; ++i) {
    std::uint32_t left = cfg.state;
    StepOutcome out = advance(model, cfg, rng);
    ++stats.steps;
    stats.time_total += out.dwell;
    if (is_target[left]) {
      ++stats.target_visits;
      stats.time_in_target += out.dwell;
    }
    if (options.record_trace) {
      result.trace.push_back(
          {stats.steps, left, out.occurring, out.dwell, cfg.elapsed, cfg.state});
    }
    if (options.observer) options.observer(stats.steps, out.occurring, out.dwell, cfg);
    if (stats.steps == next_checkpoint) {
      stats.checkpoints.push_back({stats.steps, stats.partial_d(), stats.partial_c()});
      next_checkpoint *= options.checkpoint_base;
    }
    if (options.max_time > 0.0 && stats.time_total >= options.max_time) break;
  }
  return result;
}

double event_distance(const Configuration& cfg, std::uint32_t e, std::uint32_t f) {
  if (!cfg.scheduled(e) || !cfg.scheduled(f))
    throw std::invalid_argument("event_distance: event not scheduled");
  double d = cfg.elapsed[f] - cfg.elapsed[e];
  double fr = d - std::floor(d);
  if (fr >= 1.0) fr = 0.0;  // guard against rounding at the wrap
  return fr;
}

PhaseSegmenter::PhaseSegmenter(std::vector<std::uint32_t> entry_states,
                               std::vector<std::uint32_t> attempt_states, std::uint32_t event_e,
                               std::uint32_t event_f)
    : entry_(std::move(entry_states)), attempt_(std::move(attempt_states)), e_(event_e),
      f_(event_f) {}

void PhaseSegmenter::observe(const Configuration& after) {
  auto contains = [](const std::vector<std::uint32_t>& v, std::uint32_t s) {
    for (std::uint32_t x : v)
      if (x == s) return true;
    return false;
  };
  if (contains(entry_, after.state)) {
    if (open_) done_.push_back(current_);
    current_ = Phase{};
    open_ = true;
    have_distance_ = false;
    return;
  }
  if (open_ && contains(attempt_, after.state)) {
    ++current_.attempts;
    if (!have_distance_) {
      current_.start_distance = event_distance(after, e_, f_);
      have_distance_ = true;
    }
  }
}

std::vector<Phase> PhaseSegmenter::finish() {
  if (open_ && current_.attempts > 0) done_.push_back(current_);
  open_ = false;
  for (std::size_t i = 0; i + 1 < done_.size(); ++i)
    done_[i].strong = done_[i + 1].start_distance <= 0.5 * done_[i].start_distance;
  return done_;
}

std::vector<Phase> phase_tracker(const GsmpModel& model, const Trace& trace,
                                 const std::vector<std::uint32_t>& entry_states,
                                 const std::vector<std::uint32_t>& attempt_states,
                                 std::uint32_t event_e, std::uint32_t event_f) {
  PhaseSegmenter seg(entry_states, attempt_states, event_e, event_f);
  Configuration cfg;
  cfg.elapsed.assign(model.event_count(), kUnscheduled);
  for (const auto& row : trace) {
    cfg.state = row.next_state;
    cfg.elapsed = row.elapsed;
    cfg.last_step = row.dwell;
    seg.observe(cfg);
  }
  return seg.finish();
}

std::string trace_csv(const GsmpModel& model, const Trace& trace) {
  std::ostringstream out;
  out << "step,dwell,state,occurring";
  for (std::uint32_t e = 0; e < model.event_count(); ++e) out << "," << model.event(e).name;
  out << "\n";
  for (const auto& row : trace) {
    out << row.step << "," << format_real(row.dwell) << "," << model.state_name(row.next_state)
        << "," << model.mask_names(row.occurring);
    for (std::uint32_t e = 0; e < model.event_count(); ++e) {
      out << ",";
      if (row.elapsed[e] >= 0.0) out << format_real(row.elapsed[e]);
    }
    out << "\n";
  }
  return out.str();
}

std::string checkpoints_csv(const RunStats& stats) {
  std::ostringstream out;
  out << "step,partial_d,partial_c\n";
  for (const auto& cp : stats.checkpoints)
    out << cp.step << "," << format_real(cp.partial_d) << "," << format_real(cp.partial_c) << "\n";
  return out.str();
}

}  // namespace gsmp
