#include "gsmp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gsmp/parallel.hpp"
#include "gsmp/simulator.hpp"

namespace gsmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre nodes and weights on [-1, 1], computed once.
const std::vector<std::pair<double, double>>& gl32() {
  static const std::vector<std::pair<double, double>> table = [] {
    const int n = 32;
    std::vector<std::pair<double, double>> nodes(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
      double p1 = 0.0, p0 = 0.0, dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return nodes;
  }();
  return table;
}

template <typename F>
double gauss_integrate(F&& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double total = 0.0;
  for (const auto& [x, w] : gl32()) total += w * f(mid + half * x);
  return total * half;
}

// inverse normal CDF (Acklam's rational approximation, |error| < 1.2e-9)
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level outside (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// two-sided Student quantile via the Cornish-Fisher expansion in 1/dof
double t_quantile(double confidence, int dof) {
  if (dof < 3) dof = 3;
  const double z = normal_quantile(0.5 + confidence / 2.0);
  double nu = dof;
  return z + (z * z * z + z) / (4.0 * nu) +
         (5 * std::pow(z, 5) + 16 * z * z * z + 3 * z) / (96.0 * nu * nu);
}

}  // namespace

double expected_waiting_time(const GsmpModel& model, const Configuration& cfg) {
  struct Var {
    const DelayLaw* law;
    double elapsed;
  };
  std::vector<Var> vars;
  double deadline = kInf;      // earliest fixed-delay occurrence
  double bounded_max = kInf;   // every bounded variable event has fired by then
  for (std::uint32_t e : model.scheduled_events(cfg.state)) {
    const DelayLaw& law = model.event(e).law;
    if (law.is_fixed()) {
      deadline = std::min(deadline, static_cast<double>(*law.upper) - cfg.elapsed[e]);
    } else {
      vars.push_back({&law, cfg.elapsed[e]});
      if (law.is_bounded())
        bounded_max = std::min(bounded_max, static_cast<double>(*law.upper) - cfg.elapsed[e]);
    }
  }

  if (vars.empty()) {
    if (deadline == kInf) throw std::logic_error("unbounded waiting time");
    return deadline;  // nothing can preempt the first fixed occurrence
  }

  double upper = std::min(deadline, bounded_max);
  auto survival = [&](double t) {
    double p = 1.0;
    for (const auto& v : vars) p *= residual_survival(*v.law, v.elapsed, t);
    return p;
  };

  // breakpoints where a survival factor changes formula
  std::vector<double> cuts{0.0};
  for (const auto& v : vars) {
    double head = static_cast<double>(v.law->lower) - v.elapsed;
    if (head > 0.0 && (upper == kInf || head < upper)) cuts.push_back(head);
  }
  if (upper < kInf) cuts.push_back(upper);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / 4.0)));
    for (int p = 0; p < pieces; ++p) {
      double lo = a + (b - a) * p / pieces;
      double hi = a + (b - a) * (p + 1) / pieces;
      total += gauss_integrate(survival, lo, hi);
    }
  }
  if (upper == kInf) {
    // only exponential tails remain beyond the last cut
    double t0 = cuts.back();
    double lambda = 0.0;
    for (const auto& v : vars) lambda += v.law->rate;
    if (lambda <= 0.0) throw std::logic_error("unbounded waiting time");
    total += survival(t0) / lambda;
  }
  return total;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                          double confidence) {
  if (trials == 0) return {0.0, 1.0};
  const double z = normal_quantile(0.5 + confidence / 2.0);
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

ReachReport estimate_reach_probabilities(const GsmpModel& model, const RegionGraph& labeled,
                                         const ReachOptions& options, std::uint64_t seed) {
  if (labeled.bscc_id.empty())
    throw std::invalid_argument("reach estimation needs a BSCC-labeled region graph");

  std::uint64_t max_steps = 1;
  while (max_steps * 2 <= options.max_steps) max_steps *= 2;

  struct RunRecord {
    int bscc = -1;
    std::uint64_t entry_step = 0;
    Configuration entry;
  };
  std::vector<RunRecord> records(options.runs);
  std::vector<std::uint64_t> off_graph(options.runs, 0);

  run_parallel(options.runs, options.workers, [&](std::size_t r) {
    RngStream rng(derive_seed(seed, r));
    Configuration cfg = initial_configuration(model, rng);
    RunRecord& rec = records[r];
    int id = labeled.find(region_of(model, cfg));
    if (id >= 0 && labeled.bscc_id[id] >= 0) {
      rec = {labeled.bscc_id[id], 0, cfg};
      return;
    }
    if (id < 0) ++off_graph[r];
    for (std::uint64_t s = 1; s <= max_steps; ++s) {
      advance(model, cfg, rng);
      id = labeled.find(region_of(model, cfg));
      if (id < 0) {
        ++off_graph[r];
        continue;
      }
      if (labeled.bscc_id[id] >= 0) {
        rec = {labeled.bscc_id[id], s, cfg};
        return;
      }
    }
  });

  ReachReport report;
  report.runs = options.runs;
  for (std::uint64_t h = 1; h <= max_steps; h *= 2) report.horizons.push_back(h);
  for (std::uint64_t o : off_graph) report.off_graph_regions += o;

  int nb = labeled.bscc_count;
  std::vector<std::uint64_t> absorbed(nb, 0);
  report.per_bscc.resize(nb);
  for (int b = 0; b < nb; ++b) {
    report.per_bscc[b].bscc = b;
    report.per_bscc[b].history.assign(report.horizons.size(), 0.0);
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    const RunRecord& rec = records[r];
    if (rec.bscc < 0) continue;
    ++absorbed[rec.bscc];
    if (!report.per_bscc[rec.bscc].has_entry) {
      report.per_bscc[rec.bscc].entry = rec.entry;
      report.per_bscc[rec.bscc].has_entry = true;
    }
    for (std::size_t hi = 0; hi < report.horizons.size(); ++hi)
      if (rec.entry_step <= report.horizons[hi]) report.per_bscc[rec.bscc].history[hi] += 1.0;
  }

  std::uint64_t absorbed_total = 0;
  for (int b = 0; b < nb; ++b) {
    ReachEstimate& est = report.per_bscc[b];
    for (double& h : est.history) h /= static_cast<double>(options.runs);
    est.estimate = static_cast<double>(absorbed[b]) / static_cast<double>(options.runs);
    auto [lo, hi] = wilson_interval(absorbed[b], options.runs, options.confidence);
    est.wilson_low = lo;
    est.wilson_high = hi;
    std::size_t k = est.history.size();
    est.plateau = k >= 2 && std::abs(est.history[k - 1] - est.history[k - 2]) <= options.plateau_tol;
    if (k >= 4) {
      if (auto fit = fit_geometric_rate(est.history)) est.fitted_rate = fit->rate;
    }
    absorbed_total += absorbed[b];
  }
  report.not_absorbed =
      static_cast<double>(options.runs - absorbed_total) / static_cast<double>(options.runs);
  return report;
}

FrequencyPair estimate_bscc_frequencies(const GsmpModel& model, const Configuration& entry,
                                        const std::vector<std::uint32_t>& targets,
                                        const FrequencyOptions& options, RngStream& rng) {
  if (options.batches < 2) throw std::invalid_argument("need at least 2 batches");
  std::vector<char> is_target(model.state_count(), 0);
  for (std::uint32_t s : targets) is_target[s] = 1;

  Configuration cfg = entry;
  std::uint64_t burn = static_cast<std::uint64_t>(options.burn_in * options.steps);
  for (std::uint64_t i = 0; i < burn; ++i) advance(model, cfg, rng);

  std::uint64_t per_batch = (options.steps - burn) / options.batches;
  if (per_batch == 0) throw std::invalid_argument("budget too small for the batch count");

  std::vector<double> batch_d(options.batches), batch_c(options.batches);
  std::uint64_t visits_total = 0, steps_total = 0;
  double time_target_total = 0.0, time_total = 0.0;
  for (int bix = 0; bix < options.batches; ++bix) {
    std::uint64_t visits = 0;
    double t_target = 0.0, t_all = 0.0;
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      std::uint32_t left = cfg.state;
      StepOutcome out = advance(model, cfg, rng);
      t_all += out.dwell;
      if (is_target[left]) {
        ++visits;
        t_target += out.dwell;
      }
    }
    batch_d[bix] = static_cast<double>(visits) / static_cast<double>(per_batch);
    batch_c[bix] = t_all > 0.0 ? t_target / t_all : 0.0;
    visits_total += visits;
    steps_total += per_batch;
    time_target_total += t_target;
    time_total += t_all;
  }

  auto batch_ci = [&](const std::vector<double>& xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (xs.size() - 1);
    return t_quantile(options.confidence, static_cast<int>(xs.size()) - 1) *
           std::sqrt(var / xs.size());
  };

  FrequencyPair result;
  result.d.value = static_cast<double>(visits_total) / static_cast<double>(steps_total);
  result.d.ci_half_width = batch_ci(batch_d);
  result.d.samples = steps_total;
  result.d.method = "monte-carlo";
  result.c.value = time_total > 0.0 ? time_target_total / time_total : 0.0;
  result.c.ci_half_width = batch_ci(batch_c);
  result.c.samples = steps_total;
  result.c.method = "monte-carlo";
  return result;
}

namespace {

struct CellGrid {
  struct StateBlock {
    std::uint32_t state;
    std::vector<std::uint32_t> events;   // dimensions, ascending event id
    std::vector<std::uint64_t> extents;  // cells per dimension
    std::uint64_t offset;                // first flat cell index of this state
    std::uint64_t size;
  };
  std::vector<StateBlock> blocks;
  std::vector<int> block_of_state;  // -1 when the state has no block
  std::uint64_t total = 0;
};

CellGrid make_grid(const GsmpModel& model, int n) {
  CellGrid grid;
  grid.block_of_state.assign(model.state_count(), -1);
  for (std::uint32_t s = 0; s < model.state_count(); ++s) {
    CellGrid::StateBlock block;
    block.state = s;
    block.size = 1;
    for (std::uint32_t e : model.scheduled_events(s)) {
      const DelayLaw& law = model.event(e).law;
      long long extent_units = law.upper ? std::min<long long>(*law.upper, n) : n;
      block.events.push_back(e);
      block.extents.push_back(static_cast<std::uint64_t>(extent_units) *
                              static_cast<std::uint64_t>(n));
      block.size *= block.extents.back();
    }
    block.offset = grid.total;
    grid.total += block.size;
    grid.block_of_state[s] = static_cast<int>(grid.blocks.size());
    grid.blocks.push_back(std::move(block));
  }
  return grid;
}

// flat cell index of a configuration; -1 when a coordinate exceeds the grid
long long cell_of(const CellGrid& grid, const Configuration& cfg, int n) {
  const auto& block = grid.blocks[grid.block_of_state[cfg.state]];
  std::uint64_t idx = 0;
  for (std::size_t d = 0; d < block.events.size(); ++d) {
    double v = cfg.elapsed[block.events[d]];
    auto k = static_cast<long long>(std::floor(v * n));
    if (k < 0) k = 0;
    if (static_cast<std::uint64_t>(k) >= block.extents[d]) return -1;
    idx = idx * block.extents[d] + static_cast<std::uint64_t>(k);
  }
  return static_cast<long long>(block.offset + idx);
}

Configuration cell_representative(const CellGrid& grid, const GsmpModel& model,
                                  std::uint64_t cell, int n, double frac) {
  // locate the block
  std::size_t bi = 0;
  while (bi + 1 < grid.blocks.size() && grid.blocks[bi + 1].offset <= cell) ++bi;
  const auto& block = grid.blocks[bi];
  std::uint64_t rest = cell - block.offset;
  std::vector<std::uint64_t> coord(block.events.size(), 0);
  for (std::size_t d = block.events.size(); d-- > 0;) {
    coord[d] = rest % block.extents[d];
    rest /= block.extents[d];
  }
  Configuration cfg;
  cfg.state = block.state;
  cfg.elapsed.assign(model.event_count(), kUnscheduled);
  for (std::size_t d = 0; d < block.events.size(); ++d)
    cfg.elapsed[block.events[d]] = (static_cast<double>(coord[d]) + frac) / n;
  return cfg;
}

}  // namespace

GridResult grid_invariant_measure(const GsmpModel& model, const std::vector<std::uint32_t>& targets,
                                  const GridSpec& spec, std::uint64_t seed) {
  TickingVerdict verdict = single_ticking_check(model);
  if (!verdict.single_ticking)
    throw std::runtime_error(
        "grid estimation refused: the model is not single-ticking, an invariant measure may "
        "not exist");
  if (spec.truncation < model.bound_b())
    throw std::invalid_argument("grid truncation must be at least the bound B");

  const int n = spec.truncation;
  CellGrid grid = make_grid(model, n);
  if (grid.total > spec.max_cells)
    throw std::runtime_error("grid has " + std::to_string(grid.total) +
                             " cells, above the configured limit");

  const std::uint64_t cells = grid.total;
  std::vector<std::map<std::uint32_t, std::uint32_t>> counts(cells);
  std::vector<std::uint64_t> dropped(cells, 0), undefined(cells, 0);
  std::vector<double> cell_w(cells, 0.0);

  const std::vector<double> fracs =
      spec.refine4 ? std::vector<double>{0.125, 0.375, 0.625, 0.875} : std::vector<double>{0.5};

  run_parallel(cells, spec.workers, [&](std::size_t cell) {
    RngStream rng(derive_seed(seed, cell));
    double w_acc = 0.0;
    int draws_per_point = spec.draws_per_cell / static_cast<int>(fracs.size());
    for (double frac : fracs) {
      Configuration rep = cell_representative(grid, model, cell, n, frac);
      w_acc += expected_waiting_time(model, rep);
      for (int k = 0; k < draws_per_point; ++k) {
        Configuration cfg = rep;
        // cells outside the reachable part of the state space may hit
        // occurrence sets the model never defines; such draws carry no mass
        try {
          advance(model, cfg, rng);
        } catch (const UnspecifiedSuccessor&) {
          ++undefined[cell];
          continue;
        }
        long long target = cell_of(grid, cfg, n);
        if (target < 0) ++dropped[cell];
        else ++counts[cell][static_cast<std::uint32_t>(target)];
      }
    }
    cell_w[cell] = w_acc / static_cast<double>(fracs.size());
  });

  // row-normalized sparse transition matrix over the kept draws; cells with
  // no defined dynamics self-loop and start with zero mass
  struct Row {
    std::vector<std::uint32_t> to;
    std::vector<double> p;
  };
  std::vector<Row> rows(cells);
  std::vector<char> live(cells, 1);
  std::uint64_t dropped_total = 0, undefined_total = 0, draws_total = 0;
  std::uint64_t live_cells = 0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    std::uint64_t kept = 0;
    for (const auto& [to, k] : counts[c]) kept += k;
    dropped_total += dropped[c];
    undefined_total += undefined[c];
    draws_total += kept + dropped[c] + undefined[c];
    if (kept == 0) {
      rows[c].to = {static_cast<std::uint32_t>(c)};
      rows[c].p = {1.0};
      live[c] = 0;
      continue;
    }
    ++live_cells;
    double row_sum = 0.0;
    for (const auto& [to, k] : counts[c]) {
      rows[c].to.push_back(to);
      rows[c].p.push_back(static_cast<double>(k) / static_cast<double>(kept));
      row_sum += rows[c].p.back();
    }
    if (std::abs(row_sum - 1.0) > 1e-9)
      throw std::logic_error("cell row not stochastic after normalization");
  }
  counts.clear();
  if (live_cells == 0) throw std::runtime_error("grid has no live cells");

  // damped power iteration; the 1/2-lazy chain has the same invariant vector
  // and converges on periodic cell chains as well
  std::vector<double> pi(cells, 0.0), next(cells, 0.0);
  for (std::uint64_t c = 0; c < cells; ++c)
    if (live[c]) pi[c] = 1.0 / static_cast<double>(live_cells);
  int it = 0;
  double residual = kInf;
  for (; it < spec.power_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t c = 0; c < cells; ++c) {
      double mass = pi[c];
      if (mass == 0.0) continue;
      const Row& row = rows[c];
      for (std::size_t k = 0; k < row.to.size(); ++k) next[row.to[k]] += mass * row.p[k];
    }
    residual = 0.0;
    for (std::uint64_t c = 0; c < cells; ++c) {
      double blended = 0.5 * pi[c] + 0.5 * next[c];
      residual += std::abs(blended - pi[c]);
      next[c] = blended;
    }
    pi.swap(next);
    if (residual < spec.tolerance) break;
  }
  if (residual >= spec.tolerance)
    throw std::runtime_error("power iteration did not converge: final residual " +
                             std::to_string(residual));

  std::vector<char> is_target(model.state_count(), 0);
  for (std::uint32_t s : targets) is_target[s] = 1;

  double d_val = 0.0, tau = 0.0, w_total = 0.0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    std::size_t bi = 0;
    while (bi + 1 < grid.blocks.size() && grid.blocks[bi + 1].offset <= c) ++bi;
    bool target = is_target[grid.blocks[bi].state];
    if (target) d_val += pi[c];
    w_total += pi[c] * cell_w[c];
    if (target) tau += pi[c] * cell_w[c];
  }

  GridResult result;
  result.cells = cells;
  result.dropped_mass =
      draws_total ? static_cast<double>(dropped_total) / static_cast<double>(draws_total) : 0.0;
  result.undefined_mass =
      draws_total ? static_cast<double>(undefined_total) / static_cast<double>(draws_total) : 0.0;
  result.iterations = it + 1;
  result.residual = residual;
  result.d = {d_val, 0.0, draws_total, "grid"};
  result.c = {w_total > 0.0 ? tau / w_total : 0.0, 0.0, draws_total, "grid"};
  return result;
}

std::optional<GeometricFit> fit_geometric_rate(const std::vector<double>& history) {
  if (history.size() < 4)
    throw std::invalid_argument("geometric fit needs at least 4 history points");
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < history.size(); ++i)
    diffs.push_back(std::abs(history[i + 1] - history[i]));

  double max_diff = *std::max_element(diffs.begin(), diffs.end());
  if (max_diff <= 1e-12) return GeometricFit{0.0, 1.0};  // converged immediately

  // trailing exact zeros are treated as converged tail
  while (!diffs.empty() && diffs.back() == 0.0) diffs.pop_back();
  if (std::find(diffs.begin(), diffs.end(), 0.0) != diffs.end()) return std::nullopt;
  if (diffs.size() < 3) return std::nullopt;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = diffs.size();
  for (std::size_t i = 0; i < m; ++i) {
    double x = static_cast<double>(i), y = std::log(diffs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = m * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  double slope = (m * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / m;
  double ss_res = 0.0, ss_tot = 0.0, mean_y = sy / m;
  for (std::size_t i = 0; i < m; ++i) {
    double y = std::log(diffs[i]);
    double fit = intercept + slope * i;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  double rate = std::exp(slope);
  if (rate >= 1.0 || r2 < 0.6) return std::nullopt;
  return GeometricFit{rate, r2};
}

}  // namespace gsmp
