#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsmp/configuration.hpp"
#include "gsmp/model.hpp"

namespace gsmp {

// Equivalence class of configurations: same state, matching integer parts
// (or jointly beyond B), and the same ordering of fractional parts. Events
// with fractional part exactly zero sit in the distinguished block 0.
struct Region {
  struct Part {
    std::uint32_t event;
    int int_part;  // in [0, B]; meaningless when beyond
    bool beyond;   // elapsed > B
    int block;     // 0 = integer-valued, then ascending fractional blocks
    bool operator==(const Part&) const = default;
  };

  std::uint32_t state = 0;
  std::vector<Part> parts;  // ascending event index, exactly the scheduled events

  bool operator==(const Region&) const = default;

  int block_count() const;                       // number of non-empty nonzero blocks
  const Part* part(std::uint32_t event) const;   // nullptr when not scheduled
  bool is_integer(std::uint32_t event) const;    // fr == 0 (false when beyond)
  std::string key() const;                       // canonical compact form
  std::string pretty(const GsmpModel& model) const;
};

struct RegionHash {
  std::size_t operator()(const Region& r) const;
};

Region region_of(const GsmpModel& model, const RationalConfiguration& cfg);
// Best-effort float classification; exact on valuations whose equalities are
// bitwise (fresh zeros and events scheduled at the same instant).
Region region_of(const GsmpModel& model, const Configuration& cfg);

// A configuration inside the region: stated integer parts, fraction k/(m+1)
// for the k-th of m nonzero blocks, B + 1/2 for beyond-B events.
RationalConfiguration canonical_representative(const GsmpModel& model, const Region& region);

struct MissingSuccessorRow : std::runtime_error {
  MissingSuccessorRow(std::string what, std::vector<std::pair<std::uint32_t, EventMask>> gaps)
      : std::runtime_error(std::move(what)), gaps(std::move(gaps)) {}
  std::vector<std::pair<std::uint32_t, EventMask>> gaps;  // (state, occurring set)
};

struct RegionSuccessor {
  EventMask occurring;
  Region target;
};

// All one-step successor regions of the canonical representative, obtained
// from exact midpoint witnesses of the firing windows plus the fixed-delay
// deadline. Throws MissingSuccessorRow listing every absent (state, events)
// pair it needed.
std::vector<RegionSuccessor> successor_regions(const GsmpModel& model, const Region& region);

struct RegionGraph {
  std::vector<Region> vertices;
  std::vector<std::vector<std::pair<int, EventMask>>> edges;  // per vertex, sorted by (to, mask)
  std::vector<std::vector<int>> adj;                          // successor ids, sorted unique

  // filled by bscc_decompose
  std::vector<int> scc_id;
  std::vector<int> bscc_id;  // -1 when the vertex is not in a bottom SCC
  int scc_count = 0;
  int bscc_count = 0;

  int find(const Region& r) const;
  std::size_t edge_count() const;

private:
  friend RegionGraph build_region_graph(const GsmpModel& model);
  friend RegionGraph bscc_decompose(RegionGraph graph);
  std::unordered_map<Region, int, RegionHash> index_;
};

// BFS over successor_regions from the initial regions (one per initial
// state, all elapsed times zero).
RegionGraph build_region_graph(const GsmpModel& model);

// Tarjan decomposition; a component is bottom iff no edge leaves it.
RegionGraph bscc_decompose(RegionGraph graph);

// gcd of cycle lengths (0 when the graph is acyclic).
int graph_period(const RegionGraph& graph);

std::string region_graph_dot(const GsmpModel& model, const RegionGraph& graph);
std::string region_graph_json(const GsmpModel& model, const RegionGraph& graph);

}  // namespace gsmp
