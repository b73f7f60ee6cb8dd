#include "gsmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gsmp {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr std::size_t kMaxEvents = 64;  // event sets are stored as 64-bit masks

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace

std::vector<ModelIssue> validate_model(const ModelParts& parts) {
  std::vector<ModelIssue> issues;
  auto add = [&](std::string msg) { issues.push_back({std::move(msg)}); };

  if (parts.states.empty()) add("model has no states");
  if (parts.events.size() > kMaxEvents) add(cat("more than ", kMaxEvents, " events"));

  std::set<std::string> state_set;
  for (const auto& s : parts.states)
    if (!state_set.insert(s).second) add(cat("duplicate state '", s, "'"));

  std::set<std::string> event_set;
  for (const auto& e : parts.events) {
    if (!event_set.insert(e.name).second) add(cat("duplicate event '", e.name, "'"));
    for (const auto& msg : e.law.check()) add(cat("event '", e.name, "': ", msg));
  }

  std::map<std::string, std::set<std::string>> sched;
  std::set<std::string> sched_states;
  for (const auto& [state, events] : parts.schedule) {
    if (!state_set.count(state)) add(cat("schedule for unknown state '", state, "'"));
    if (!sched_states.insert(state).second) add(cat("duplicate schedule row for '", state, "'"));
    if (events.empty()) add(cat("empty scheduling set for state '", state, "'"));
    auto& entry = sched[state];
    for (const auto& e : events) {
      if (!event_set.count(e)) add(cat("state '", state, "' schedules unknown event '", e, "'"));
      if (!entry.insert(e).second)
        add(cat("state '", state, "' schedules event '", e, "' twice"));
    }
  }
  for (const auto& s : parts.states)
    if (!sched_states.count(s)) add(cat("empty scheduling set for state '", s, "'"));

  std::set<std::pair<std::string, std::set<std::string>>> row_keys;
  for (const auto& row : parts.succ) {
    if (!state_set.count(row.state)) {
      add(cat("successor row for unknown state '", row.state, "'"));
      continue;
    }
    std::set<std::string> occ(row.events.begin(), row.events.end());
    if (occ.empty()) add(cat("successor row for '", row.state, "' has no occurring events"));
    if (!row_keys.insert({row.state, occ}).second)
      add(cat("duplicate successor row for '", row.state, "'"));
    for (const auto& e : occ) {
      if (!event_set.count(e)) {
        add(cat("successor row for '", row.state, "' uses unknown event '", e, "'"));
      } else if (sched.count(row.state) && !sched[row.state].count(e)) {
        add(cat("successor row for '", row.state, "' uses event '", e,
                "' that is not scheduled there"));
      }
    }
    double total = 0.0;
    for (const auto& [target, w] : row.targets) {
      if (!state_set.count(target))
        add(cat("successor row for '", row.state, "' targets unknown state '", target, "'"));
      if (w < 0.0) add(cat("successor row for '", row.state, "' has a negative weight"));
      total += w;
    }
    if (std::abs(total - 1.0) > kNormTolerance)
      add(cat("distribution not normalized: successor row for '", row.state, "' sums to ",
              total));
  }

  double init_total = 0.0;
  std::set<std::string> init_states;
  for (const auto& [state, w] : parts.init) {
    if (!state_set.count(state)) add(cat("initial distribution names unknown state '", state, "'"));
    if (!init_states.insert(state).second)
      add(cat("initial distribution names state '", state, "' twice"));
    if (w < 0.0) add("initial distribution has a negative weight");
    init_total += w;
  }
  if (parts.init.empty())
    add("initial distribution is empty");
  else if (std::abs(init_total - 1.0) > kNormTolerance)
    add(cat("distribution not normalized: initial distribution sums to ", init_total));

  return issues;
}

GsmpModel GsmpModel::compile(ModelParts parts) {
  auto issues = validate_model(parts);
  if (!issues.empty()) {
    std::string msg = "invalid model:";
    for (const auto& i : issues) msg += "\n  " + i.what;
    throw std::invalid_argument(msg);
  }

  GsmpModel m;
  m.state_names_ = parts.states;
  m.events_ = parts.events;

  auto sidx = [&](const std::string& name) {
    return static_cast<std::uint32_t>(
        std::find(m.state_names_.begin(), m.state_names_.end(), name) - m.state_names_.begin());
  };
  auto eidx = [&](const std::string& name) {
    for (std::uint32_t i = 0; i < m.events_.size(); ++i)
      if (m.events_[i].name == name) return i;
    return std::uint32_t(~0u);
  };

  m.scheduled_.assign(m.state_names_.size(), {});
  m.scheduled_mask_.assign(m.state_names_.size(), 0);
  for (const auto& [state, events] : parts.schedule) {
    std::uint32_t s = sidx(state);
    for (const auto& e : events) {
      std::uint32_t id = eidx(e);
      m.scheduled_[s].push_back(id);
      m.scheduled_mask_[s] |= EventMask(1) << id;
    }
    std::sort(m.scheduled_[s].begin(), m.scheduled_[s].end());
  }

  m.rows_.assign(m.state_names_.size(), {});
  for (const auto& row : parts.succ) {
    std::uint32_t s = sidx(row.state);
    EventMask mask = 0;
    for (const auto& e : row.events) mask |= EventMask(1) << eidx(e);
    Row compiled{mask, {}};
    double total = 0.0;
    for (const auto& [target, w] : row.targets) total += w;
    for (const auto& [target, w] : row.targets)
      if (w > 0.0) compiled.targets.emplace_back(sidx(target), w / total);
    m.rows_[s].push_back(std::move(compiled));
  }

  double init_total = 0.0;
  for (const auto& [state, w] : parts.init) init_total += w;
  for (const auto& [state, w] : parts.init)
    if (w > 0.0) m.init_.emplace_back(sidx(state), w / init_total);

  m.lex_rank_.resize(m.events_.size());
  {
    std::vector<std::uint32_t> order(m.events_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return m.events_[a].name < m.events_[b].name;
    });
    for (std::uint32_t r = 0; r < order.size(); ++r) m.lex_rank_[order[r]] = r;
  }

  m.bound_b_ = 0;
  for (const auto& e : m.events_) {
    m.bound_b_ = std::max(m.bound_b_, e.law.lower);
    if (e.law.upper) m.bound_b_ = std::max(m.bound_b_, *e.law.upper);
  }

  m.parts_ = std::move(parts);
  return m;
}

std::optional<std::uint32_t> GsmpModel::state_index(const std::string& name) const {
  auto it = std::find(state_names_.begin(), state_names_.end(), name);
  if (it == state_names_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - state_names_.begin());
}

std::optional<std::uint32_t> GsmpModel::event_index(const std::string& name) const {
  for (std::uint32_t i = 0; i < events_.size(); ++i)
    if (events_[i].name == name) return i;
  return std::nullopt;
}

const GsmpModel::Row* GsmpModel::find_row(std::uint32_t s, EventMask occurring) const {
  for (const auto& row : rows_[s])
    if (row.events == occurring) return &row;
  return nullptr;
}

std::string GsmpModel::mask_names(EventMask mask) const {
  std::vector<std::string> names;
  for (std::uint32_t e = 0; e < events_.size(); ++e)
    if ((mask >> e) & 1u) names.push_back(events_[e].name);
  std::sort(names.begin(), names.end());
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += "+";
    out += n;
  }
  return out;
}

}  // namespace gsmp
