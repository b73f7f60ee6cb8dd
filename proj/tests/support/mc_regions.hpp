#pragma once

// Independent region-graph oracle: breadth-first search whose successor sets
// come from Monte Carlo one-step sampling instead of the exact window
// enumeration.

#include <deque>
#include <map>
#include <set>
#include <vector>

#include "gsmp/region.hpp"
#include "gsmp/rng.hpp"
#include "gsmp/simulator.hpp"

namespace testsupport {

struct McRegionGraph {
  std::vector<gsmp::Region> vertices;
  std::map<std::string, int> index;  // by region key
  std::set<std::pair<int, int>> edges;
};

// Jittered in-region configuration: random fractional values that respect
// the region's block structure.
inline gsmp::Configuration random_in_region(const gsmp::GsmpModel& model,
                                            const gsmp::Region& region, gsmp::RngStream& rng) {
  int m = region.block_count();
  std::vector<double> block_fr(m + 1, 0.0);
  // strictly increasing fractional values in (0, 1), one per nonzero block,
  // kept inside the middle of each slot so no boundary is crossed
  for (int b = 1; b <= m; ++b) {
    double lo = static_cast<double>(b) / (m + 1);
    double slot = 1.0 / (m + 1);
    block_fr[b] = lo - slot / 3.0 + rng.next_unit() * (2.0 * slot / 3.0);
  }
  gsmp::Configuration cfg;
  cfg.state = region.state;
  cfg.elapsed.assign(model.event_count(), gsmp::kUnscheduled);
  for (const auto& p : region.parts) {
    if (p.beyond)
      cfg.elapsed[p.event] = static_cast<double>(model.bound_b()) + 0.25 + 0.5 * rng.next_unit();
    else
      cfg.elapsed[p.event] = static_cast<double>(p.int_part) + block_fr[p.block];
  }
  return cfg;
}

// BFS with sampled successors; `samples` one-step draws per (region, start
// configuration). Returns the discovered graph and the number of sampled
// steps.
inline McRegionGraph mc_region_graph(const gsmp::GsmpModel& model, int samples,
                                     std::uint64_t seed, std::uint64_t* steps_out = nullptr) {
  McRegionGraph graph;
  gsmp::RngStream rng(seed);
  std::uint64_t steps = 0;

  auto intern = [&](const gsmp::Region& r) {
    auto it = graph.index.find(r.key());
    if (it != graph.index.end()) return it->second;
    int id = static_cast<int>(graph.vertices.size());
    graph.vertices.push_back(r);
    graph.index.emplace(r.key(), id);
    return id;
  };

  std::deque<int> frontier;
  std::set<int> expanded;
  for (const auto& [s, w] : model.init()) {
    gsmp::RationalConfiguration cfg;
    cfg.state = s;
    cfg.elapsed.assign(model.event_count(), std::nullopt);
    for (std::uint32_t e : model.scheduled_events(s)) cfg.elapsed[e] = gsmp::Rational(0);
    frontier.push_back(intern(region_of(model, cfg)));
  }

  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    if (!expanded.insert(v).second) continue;
    gsmp::Region region = graph.vertices[v];
    // canonical representative plus two jitters
    std::vector<gsmp::Configuration> starts{
        gsmp::to_configuration(canonical_representative(model, region)),
        random_in_region(model, region, rng), random_in_region(model, region, rng)};
    for (const auto& start : starts) {
      for (int k = 0; k < samples; ++k) {
        gsmp::Configuration cfg = start;
        advance(model, cfg, rng);
        ++steps;
        int to = intern(region_of(model, cfg));
        graph.edges.insert({v, to});
        if (!expanded.count(to)) frontier.push_back(to);
      }
    }
  }
  if (steps_out) *steps_out = steps;
  return graph;
}

}  // namespace testsupport
