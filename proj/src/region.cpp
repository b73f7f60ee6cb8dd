#include "gsmp/region.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gsmp {

namespace {

// new events after a transition: scheduled in `to` and either not scheduled
// in `from` or part of the occurring set (the remaining ones are inherited)
EventMask newly_scheduled_mask(const GsmpModel& model, std::uint32_t from, EventMask occurring,
                               std::uint32_t to) {
  EventMask efrom = model.scheduled_mask(from);
  EventMask eto = model.scheduled_mask(to);
  return (eto & ~efrom) | (eto & occurring);
}

template <typename Value, typename IsInteger, typename Frac, typename Less>
void assign_blocks(std::vector<Region::Part>& parts, const std::vector<Value>& frs,
                   IsInteger is_int, Frac, Less less) {
  // parts[i] beyond entries keep block -1; the rest get 0 for fr == 0 and
  // 1..m by ascending fractional part
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!parts[i].beyond) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return less(frs[a], frs[b]); });
  int block = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t i = order[k];
    if (is_int(frs[i])) {
      parts[i].block = 0;
      continue;
    }
    if (k == 0 || less(frs[order[k - 1]], frs[i]) || is_int(frs[order[k - 1]])) ++block;
    parts[i].block = block;
  }
}

}  // namespace

int Region::block_count() const {
  int m = 0;
  for (const auto& p : parts)
    if (!p.beyond) m = std::max(m, p.block);
  return m;
}

const Region::Part* Region::part(std::uint32_t event) const {
  for (const auto& p : parts)
    if (p.event == event) return &p;
  return nullptr;
}

bool Region::is_integer(std::uint32_t event) const {
  const Part* p = part(event);
  return p && !p->beyond && p->block == 0;
}

std::string Region::key() const {
  std::string out = "s" + std::to_string(state);
  for (const auto& p : parts) {
    out += "|" + std::to_string(p.event) + ":";
    if (p.beyond) out += ">";
    else out += std::to_string(p.int_part) + "b" + std::to_string(p.block);
  }
  return out;
}

std::string Region::pretty(const GsmpModel& model) const {
  std::string out = model.state_name(state);
  for (const auto& p : parts) {
    const std::string& name = model.event(p.event).name;
    out += "; ";
    if (p.beyond) out += name + ">B";
    else if (p.block == 0) out += name + "=" + std::to_string(p.int_part);
    else
      out += std::to_string(p.int_part) + "<" + name + "<" + std::to_string(p.int_part + 1) +
             "#" + std::to_string(p.block);
  }
  return out;
}

std::size_t RegionHash::operator()(const Region& r) const {
  std::size_t h = std::hash<std::uint32_t>()(r.state);
  for (const auto& p : r.parts) {
    std::size_t x = (std::size_t(p.event) << 24) ^ (std::size_t(p.int_part + 1) << 8) ^
                    (std::size_t(p.block + 2) << 1) ^ std::size_t(p.beyond);
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Region region_of(const GsmpModel& model, const RationalConfiguration& cfg) {
  const long long b = model.bound_b();
  Region region;
  region.state = cfg.state;
  std::vector<Rational> frs;
  for (std::uint32_t e : model.scheduled_events(cfg.state)) {
    const Rational& v = *cfg.elapsed[e];
    Region::Part part{e, 0, false, -1};
    if (v > Rational(b)) {
      part.beyond = true;
      frs.push_back(Rational(0));
    } else {
      part.int_part = static_cast<int>(v.floor());
      frs.push_back(v.frac());
    }
    region.parts.push_back(part);
  }
  assign_blocks(
      region.parts, frs, [](const Rational& r) { return r == Rational(0); },
      [](const Rational& r) { return r; },
      [](const Rational& a, const Rational& b2) { return a < b2; });
  return region;
}

Region region_of(const GsmpModel& model, const Configuration& cfg) {
  const double b = static_cast<double>(model.bound_b());
  Region region;
  region.state = cfg.state;
  std::vector<double> frs;
  for (std::uint32_t e : model.scheduled_events(cfg.state)) {
    double v = cfg.elapsed[e];
    Region::Part part{e, 0, false, -1};
    if (v > b) {
      part.beyond = true;
      frs.push_back(0.0);
    } else {
      double fl = std::floor(v);
      part.int_part = static_cast<int>(fl);
      frs.push_back(v - fl);
    }
    region.parts.push_back(part);
  }
  assign_blocks(
      region.parts, frs, [](double r) { return r == 0.0; }, [](double r) { return r; },
      [](double a, double b2) { return a < b2; });
  return region;
}

RationalConfiguration canonical_representative(const GsmpModel& model, const Region& region) {
  const long long b = model.bound_b();
  const int m = region.block_count();
  RationalConfiguration cfg;
  cfg.state = region.state;
  cfg.elapsed.assign(model.event_count(), std::nullopt);
  for (const auto& p : region.parts) {
    if (p.beyond) cfg.elapsed[p.event] = Rational(2 * b + 1, 2);  // B + 1/2
    else if (p.block == 0) cfg.elapsed[p.event] = Rational(p.int_part);
    else cfg.elapsed[p.event] = Rational(p.int_part) + Rational(p.block, m + 1);
  }
  return cfg;
}

std::vector<RegionSuccessor> successor_regions(const GsmpModel& model, const Region& region) {
  const long long b = model.bound_b();
  RationalConfiguration z = canonical_representative(model, region);
  const auto& sched = model.scheduled_events(region.state);

  bool has_fixed = false, has_bounded = false;
  Rational fixed_u(0), var_max(0);
  EventMask fprime = 0;
  for (std::uint32_t e : sched) {
    const DelayLaw& law = model.event(e).law;
    const Rational& v = *z.elapsed[e];
    if (law.is_fixed()) {
      Rational rem = Rational(*law.upper) - v;
      if (!has_fixed || rem < fixed_u) {
        has_fixed = true;
        fixed_u = rem;
        fprime = EventMask(1) << e;
      } else if (rem == fixed_u) {
        fprime |= EventMask(1) << e;
      }
    } else if (law.is_bounded()) {
      Rational rem = Rational(*law.upper) - v;
      if (!has_bounded || rem < var_max) {
        has_bounded = true;
        var_max = rem;
      }
    }
  }
  bool has_horizon = has_fixed || has_bounded;
  Rational horizon = has_fixed ? (has_bounded ? std::min(fixed_u, var_max) : fixed_u)
                               : (has_bounded ? var_max : Rational(0));

  // every time an event's elapsed value crosses an integer up to B is a
  // qualitative boundary; the horizon itself is one of them
  std::vector<Rational> bounds;
  for (std::uint32_t e : sched) {
    const Rational& v = *z.elapsed[e];
    if (v > Rational(b)) continue;
    for (long long k = v.floor() + 1; k <= b; ++k) {
      Rational t = Rational(k) - v;
      if (t > Rational(0) && (!has_horizon || t <= horizon)) bounds.push_back(t);
    }
  }
  if (has_horizon) bounds.push_back(horizon);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<std::pair<Rational, EventMask>> candidates;
  auto add_variable_candidates = [&](const Rational& t) {
    for (std::uint32_t e : sched) {
      const DelayLaw& law = model.event(e).law;
      if (law.is_fixed()) continue;
      Rational total = *z.elapsed[e] + t;
      if (!(total > Rational(law.lower))) continue;
      if (law.is_bounded() && !(total < Rational(*law.upper))) continue;
      candidates.emplace_back(t, EventMask(1) << e);
    }
  };

  Rational prev(0);
  for (const Rational& bd : bounds) {
    add_variable_candidates((prev + bd) / Rational(2));
    prev = bd;
  }
  if (!has_horizon) add_variable_candidates(prev + Rational(1, 2));
  if (has_fixed && (!has_bounded || fixed_u < var_max)) candidates.emplace_back(fixed_u, fprime);

  std::vector<std::pair<std::uint32_t, EventMask>> gaps;
  std::vector<RegionSuccessor> result;
  for (const auto& [t, mask] : candidates) {
    const GsmpModel::Row* row = model.find_row(region.state, mask);
    if (!row) {
      if (std::find(gaps.begin(), gaps.end(),
                    std::make_pair(region.state, mask)) == gaps.end())
        gaps.emplace_back(region.state, mask);
      continue;
    }
    for (const auto& [next_state, weight] : row->targets) {
      (void)weight;
      RationalConfiguration next;
      next.state = next_state;
      next.elapsed.assign(model.event_count(), std::nullopt);
      EventMask fresh = newly_scheduled_mask(model, region.state, mask, next_state);
      for (std::uint32_t f : model.scheduled_events(next_state)) {
        if ((fresh >> f) & 1u) next.elapsed[f] = Rational(0);
        else next.elapsed[f] = *z.elapsed[f] + t;
      }
      result.push_back({mask, region_of(model, next)});
    }
  }
  if (!gaps.empty()) {
    std::string msg = "missing successor rows:";
    for (const auto& [s, mask] : gaps)
      msg += "\n  state '" + model.state_name(s) + "', occurring {" + model.mask_names(mask) + "}";
    throw MissingSuccessorRow(msg, gaps);
  }

  std::sort(result.begin(), result.end(), [](const RegionSuccessor& a, const RegionSuccessor& b2) {
    if (a.occurring != b2.occurring) return a.occurring < b2.occurring;
    return a.target.key() < b2.target.key();
  });
  result.erase(std::unique(result.begin(), result.end(),
                           [](const RegionSuccessor& a, const RegionSuccessor& b2) {
                             return a.occurring == b2.occurring && a.target == b2.target;
                           }),
               result.end());
  return result;
}

int RegionGraph::find(const Region& r) const {
  auto it = index_.find(r);
  return it == index_.end() ? -1 : it->second;
}

std::size_t RegionGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adj) n += a.size();
  return n;
}

namespace {

// ordered set partitions of n elements (Fubini numbers), saturating
double fubini(std::size_t n) {
  std::vector<double> a(n + 1, 0.0);
  a[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    double total = 0.0, binom = 1.0;
    for (std::size_t k = 1; k <= i; ++k) {
      binom = binom * double(i - k + 1) / double(k);
      total += binom * a[i - k];
      if (total > 1e18) return 1e18;
    }
    a[i] = total;
  }
  return a[n];
}

}  // namespace

RegionGraph build_region_graph(const GsmpModel& model) {
  RegionGraph graph;

  double cap = static_cast<double>(model.state_count());
  for (std::size_t e = 0; e < model.event_count(); ++e) {
    cap *= static_cast<double>(model.bound_b() + 2);
    if (cap > 1e18) break;
  }
  cap *= fubini(model.event_count() + 1);
  constexpr std::size_t kHardLimit = 2'000'000;

  auto intern = [&](const Region& r) {
    int id = graph.find(r);
    if (id >= 0) return id;
    id = static_cast<int>(graph.vertices.size());
    graph.vertices.push_back(r);
    graph.index_.emplace(r, id);
    graph.edges.emplace_back();
    graph.adj.emplace_back();
    if (graph.vertices.size() > kHardLimit ||
        static_cast<double>(graph.vertices.size()) > cap)
      throw std::runtime_error("region graph exceeds its size bound");
    return id;
  };

  std::vector<std::uint32_t> roots;
  for (const auto& [s, w] : model.init())
    if (std::find(roots.begin(), roots.end(), s) == roots.end()) roots.push_back(s);
  std::sort(roots.begin(), roots.end());

  std::deque<int> frontier;
  for (std::uint32_t s : roots) {
    RationalConfiguration cfg;
    cfg.state = s;
    cfg.elapsed.assign(model.event_count(), std::nullopt);
    for (std::uint32_t e : model.scheduled_events(s)) cfg.elapsed[e] = Rational(0);
    frontier.push_back(intern(region_of(model, cfg)));
  }

  std::vector<char> expanded;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    if (static_cast<std::size_t>(v) < expanded.size() && expanded[v]) continue;
    if (static_cast<std::size_t>(v) >= expanded.size()) expanded.resize(v + 1, 0);
    expanded[v] = 1;
    Region region = graph.vertices[v];
    for (const auto& succ : successor_regions(model, region)) {
      int to = intern(succ.target);
      graph.edges[v].emplace_back(to, succ.occurring);
      if (static_cast<std::size_t>(to) >= expanded.size() || !expanded[to])
        frontier.push_back(to);
    }
    auto& es = graph.edges[v];
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    auto& a = graph.adj[v];
    for (const auto& [to, mask] : es)
      if (a.empty() || a.back() != to) a.push_back(to);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return graph;
}

RegionGraph bscc_decompose(RegionGraph graph) {
  const int n = static_cast<int>(graph.vertices.size());
  graph.scc_id.assign(n, -1);
  graph.bscc_id.assign(n, -1);

  // iterative Tarjan
  std::vector<int> low(n, -1), num(n, -1), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int counter = 0, comp_count = 0;
  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (num[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    while (!call.empty()) {
      Frame& f = call.back();
      int v = f.v;
      if (f.child == 0) {
        num[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (f.child < graph.adj[v].size()) {
        int w = graph.adj[v][f.child++];
        if (num[w] == -1) {
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], num[w]);
        }
      } else {
        if (low[v] == num[v]) {
          int c = comp_count++;
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = c;
            if (w == v) break;
          }
        }
        call.pop_back();
        if (!call.empty()) {
          int parent = call.back().v;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }

  std::vector<char> has_exit(comp_count, 0);
  for (int v = 0; v < n; ++v)
    for (int w : graph.adj[v])
      if (comp[v] != comp[w]) has_exit[comp[v]] = 1;

  // bottom components numbered by their smallest vertex
  std::vector<int> bscc_of_comp(comp_count, -1);
  int next_bscc = 0;
  for (int v = 0; v < n; ++v) {
    int c = comp[v];
    if (!has_exit[c] && bscc_of_comp[c] == -1) bscc_of_comp[c] = next_bscc++;
  }
  graph.scc_count = comp_count;
  graph.bscc_count = next_bscc;
  for (int v = 0; v < n; ++v) {
    graph.scc_id[v] = comp[v];
    graph.bscc_id[v] = bscc_of_comp[comp[v]];
  }
  return graph;
}

int graph_period(const RegionGraph& graph) {
  const int n = static_cast<int>(graph.vertices.size());
  std::vector<int> comp = graph.scc_id;
  if (comp.empty() || static_cast<int>(comp.size()) != n) return 0;

  long long g = 0;
  std::vector<long long> level(n, -1);
  for (int root = 0; root < n; ++root) {
    if (level[root] != -1) continue;
    level[root] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : graph.adj[v]) {
        if (comp[w] != comp[v]) continue;
        if (level[w] == -1) {
          level[w] = level[v] + 1;
          queue.push_back(w);
        } else {
          long long d = level[v] + 1 - level[w];
          if (d != 0) g = std::gcd(g, d < 0 ? -d : d);
        }
      }
    }
  }
  return static_cast<int>(g);
}

std::string region_graph_dot(const GsmpModel& model, const RegionGraph& graph) {
  static const char* palette[] = {"lightblue", "lightgreen", "lightsalmon", "khaki",
                                  "plum",      "lightcyan",  "wheat",       "pink"};
  std::ostringstream out;
  out << "digraph regions {\n  rankdir=LR;\n  node [shape=box, style=filled, fillcolor=white];\n";
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    out << "  r" << v << " [label=\"" << graph.vertices[v].pretty(model) << "\"";
    if (v < graph.bscc_id.size() && graph.bscc_id[v] >= 0)
      out << ", fillcolor=" << palette[graph.bscc_id[v] % 8];
    out << "];\n";
  }
  for (std::size_t v = 0; v < graph.edges.size(); ++v)
    for (const auto& [to, mask] : graph.edges[v])
      out << "  r" << v << " -> r" << to << " [label=\"" << model.mask_names(mask) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string region_graph_json(const GsmpModel& model, const RegionGraph& graph) {
  nlohmann::ordered_json doc;
  doc["vertex_count"] = graph.vertices.size();
  doc["edge_count"] = graph.edge_count();
  doc["scc_count"] = graph.scc_count;
  doc["bscc_count"] = graph.bscc_count;
  auto vertices = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const Region& r = graph.vertices[v];
    nlohmann::ordered_json jr;
    jr["id"] = v;
    jr["state"] = model.state_name(r.state);
    auto events = nlohmann::ordered_json::array();
    for (const auto& p : r.parts) {
      nlohmann::ordered_json jp;
      jp["event"] = model.event(p.event).name;
      if (p.beyond) {
        jp["beyond_bound"] = true;
      } else {
        jp["int"] = p.int_part;
        jp["block"] = p.block;
      }
      events.push_back(jp);
    }
    jr["events"] = events;
    if (v < graph.bscc_id.size() && graph.bscc_id[v] >= 0) jr["bscc"] = graph.bscc_id[v];
    vertices.push_back(jr);
  }
  doc["vertices"] = vertices;
  auto edges = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < graph.edges.size(); ++v)
    for (const auto& [to, mask] : graph.edges[v])
      edges.push_back({{"from", v}, {"to", to}, {"events", model.mask_names(mask)}});
  doc["edges"] = edges;
  return doc.dump(2);
}

}  // namespace gsmp
