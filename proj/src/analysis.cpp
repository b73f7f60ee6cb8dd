#include "gsmp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gsmp {

namespace {

EventMask newly_scheduled_mask(const GsmpModel& model, std::uint32_t from, EventMask occurring,
                               std::uint32_t to) {
  EventMask efrom = model.scheduled_mask(from);
  EventMask eto = model.scheduled_mask(to);
  return (eto & ~efrom) | (eto & occurring);
}

}  // namespace

bool CausesRelation::contains(std::uint32_t f, std::uint32_t g) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(f, g));
}

CausesRelation causes_relation(const GsmpModel& model) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t s = 0; s < model.state_count(); ++s) {
    for (const auto& row : model.rows(s)) {
      for (const auto& [target, weight] : row.targets) {
        if (weight <= 0.0) continue;
        EventMask fresh = newly_scheduled_mask(model, s, row.events, target);
        for (std::uint32_t f = 0; f < model.event_count(); ++f) {
          if (!((row.events >> f) & 1u) || !model.event(f).law.is_fixed()) continue;
          for (std::uint32_t g = 0; g < model.event_count(); ++g)
            if (((fresh >> g) & 1u) && model.event(g).law.is_fixed()) edges.insert({f, g});
        }
      }
    }
  }
  CausesRelation rel;
  rel.edges.assign(edges.begin(), edges.end());
  return rel;
}

TickingVerdict single_ticking_check(const GsmpModel& model) {
  std::vector<std::uint32_t> fixed;
  for (std::uint32_t e = 0; e < model.event_count(); ++e)
    if (model.event(e).law.is_fixed()) fixed.push_back(e);

  TickingVerdict verdict;
  if (fixed.empty()) {
    verdict.single_ticking = true;
    return verdict;
  }

  CausesRelation rel = causes_relation(model);
  std::vector<std::uint32_t> self_loops;
  for (std::uint32_t e : fixed)
    if (rel.contains(e, e)) self_loops.push_back(e);

  if (self_loops.size() >= 2) {
    verdict.single_ticking = false;
    verdict.violation = {{self_loops[0], self_loops[0]}, {self_loops[1], self_loops[1]}};
    return verdict;
  }

  // candidate ticking events: the unique self-looper, or any fixed event
  std::vector<std::uint32_t> candidates =
      self_loops.empty() ? fixed : std::vector<std::uint32_t>{self_loops[0]};

  auto find_cycle = [&](const std::vector<std::pair<std::uint32_t, std::uint32_t>>& graph)
      -> std::vector<std::pair<std::uint32_t, std::uint32_t>> {
    // DFS cycle detection over the fixed events
    std::map<std::uint32_t, std::vector<std::uint32_t>> adj;
    for (const auto& [f, g] : graph) adj[f].push_back(g);
    std::map<std::uint32_t, int> color;
    std::vector<std::uint32_t> path;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cycle;
    std::function<bool(std::uint32_t)> dfs = [&](std::uint32_t v) {
      color[v] = 1;
      path.push_back(v);
      for (std::uint32_t w : adj[v]) {
        if (color[w] == 1) {
          auto it = std::find(path.begin(), path.end(), w);
          for (auto p = it; p + 1 != path.end(); ++p) cycle.emplace_back(*p, *(p + 1));
          cycle.emplace_back(path.back(), w);
          return true;
        }
        if (color[w] == 0 && dfs(w)) return true;
      }
      color[v] = 2;
      path.pop_back();
      return false;
    };
    for (std::uint32_t e : fixed)
      if (color[e] == 0 && dfs(e)) return cycle;
    return {};
  };

  for (std::uint32_t cand : candidates) {
    bool incoming = false;
    for (const auto& [f, g] : rel.edges)
      if (g == cand && f != cand) incoming = true;
    if (incoming) continue;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> rest;
    for (const auto& [f, g] : rel.edges)
      if (!(f == cand && g == cand)) rest.emplace_back(f, g);
    if (!find_cycle(rest).empty()) continue;

    // topological order of the remaining DAG with the candidate first
    std::map<std::uint32_t, int> indeg;
    for (std::uint32_t e : fixed) indeg[e] = 0;
    for (const auto& [f, g] : rest) ++indeg[g];
    std::vector<std::uint32_t> order{cand};
    std::set<std::uint32_t> placed{cand};
    while (order.size() < fixed.size()) {
      for (std::uint32_t e : fixed) {
        if (placed.count(e)) continue;
        bool ready = true;
        for (const auto& [f, g] : rest)
          if (g == e && !placed.count(f)) ready = false;
        if (ready) {
          order.push_back(e);
          placed.insert(e);
          break;
        }
      }
    }
    verdict.single_ticking = true;
    verdict.ticking_event = cand;
    verdict.order = order;
    return verdict;
  }

  verdict.single_ticking = false;
  verdict.violation = find_cycle(rel.edges);
  if (verdict.violation.empty() && !self_loops.empty())
    verdict.violation = {{self_loops[0], self_loops[0]}};
  return verdict;
}

bool is_delta_separated(const GsmpModel& model, const Configuration& cfg, double delta,
                        bool circular) {
  if (!(delta > 0.0) || delta >= 0.5)
    throw std::invalid_argument("delta must lie in (0, 1/2)");
  std::vector<double> values{0.0};
  for (std::uint32_t e : model.scheduled_events(cfg.state)) {
    double v = cfg.elapsed[e];
    values.push_back(v - std::floor(v));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (values[i] == values[j]) continue;
      double d = std::abs(values[i] - values[j]);
      if (circular) d = std::min(d, 1.0 - d);
      if (d <= delta) return false;
    }
  }
  return true;
}

AnalysisReport classify(const GsmpModel& model) {
  AnalysisReport report;
  report.verdict = single_ticking_check(model);
  report.guarantee = report.verdict.single_ticking;
  report.graph = bscc_decompose(build_region_graph(model));
  report.period = graph_period(report.graph);

  std::ostringstream text;
  if (report.guarantee) {
    text << "long-run frequencies are almost surely well-defined; one (d, c) pair per BSCC ("
         << report.graph.bscc_count << " BSCC"
         << (report.graph.bscc_count == 1 ? "" : "s") << ")";
  } else {
    text << "no guarantee: frequencies may fail to exist and bottom components may be "
            "unreachable; estimation results are diagnostic-only";
  }
  report.summary = text.str();
  return report;
}

std::string AnalysisReport::to_json(const GsmpModel& model) const {
  nlohmann::ordered_json doc;
  doc["single_ticking"] = verdict.single_ticking;
  if (verdict.ticking_event) doc["ticking_event"] = model.event(*verdict.ticking_event).name;
  else doc["ticking_event"] = nullptr;
  if (verdict.single_ticking) {
    auto order = nlohmann::ordered_json::array();
    for (std::uint32_t e : verdict.order) order.push_back(model.event(e).name);
    doc["order"] = order;
  } else {
    auto witness = nlohmann::ordered_json::array();
    for (const auto& [f, g] : verdict.violation)
      witness.push_back({{"from", model.event(f).name}, {"to", model.event(g).name}});
    doc["violation"] = witness;
  }
  doc["guarantee"] = guarantee;
  doc["summary"] = summary;
  doc["region_vertices"] = graph.vertices.size();
  doc["region_edges"] = graph.edge_count();
  doc["scc_count"] = graph.scc_count;
  doc["bscc_count"] = graph.bscc_count;
  doc["period"] = period;
  auto bsccs = nlohmann::ordered_json::array();
  for (int b = 0; b < graph.bscc_count; ++b) {
    auto members = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < graph.vertices.size(); ++v)
      if (graph.bscc_id[v] == b) members.push_back(graph.vertices[v].pretty(model));
    bsccs.push_back(members);
  }
  doc["bscc_regions"] = bsccs;
  return doc.dump(2);
}

std::string AnalysisReport::to_text(const GsmpModel& model) const {
  std::ostringstream out;
  out << "single-ticking: " << (verdict.single_ticking ? "yes" : "no") << "\n";
  if (verdict.ticking_event)
    out << "ticking event: " << model.event(*verdict.ticking_event).name << "\n";
  if (verdict.single_ticking && !verdict.order.empty()) {
    out << "order:";
    for (std::size_t i = 0; i < verdict.order.size(); ++i)
      out << (i ? " < " : " ") << model.event(verdict.order[i]).name;
    out << "\n";
  }
  if (!verdict.single_ticking) {
    out << "violation:";
    for (const auto& [f, g] : verdict.violation)
      out << " (" << model.event(f).name << " -> " << model.event(g).name << ")";
    out << "\n";
  }
  out << "regions: " << graph.vertices.size() << " vertices, " << graph.edge_count()
      << " edges, " << graph.scc_count << " SCCs, " << graph.bscc_count << " BSCCs, period "
      << period << "\n";
  out << summary << "\n";
  return out.str();
}

}  // namespace gsmp
