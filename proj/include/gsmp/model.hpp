#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsmp/delay.hpp"

namespace gsmp {

using EventMask = std::uint64_t;

struct EventSpec {
  std::string name;
  DelayLaw law;
  bool operator==(const EventSpec&) const = default;
};

// Raw model description as written in a model file or built by hand.
// Everything is by name; validate_model checks it, GsmpModel::compile turns
// it into an indexed form.
struct ModelParts {
  std::vector<std::string> states;
  std::vector<EventSpec> events;
  std::vector<std::pair<std::string, std::vector<std::string>>> schedule;
  struct SuccEntry {
    std::string state;
    std::vector<std::string> events;
    std::vector<std::pair<std::string, double>> targets;
    bool operator==(const SuccEntry&) const = default;
  };
  std::vector<SuccEntry> succ;
  std::vector<std::pair<std::string, double>> init;

  bool operator==(const ModelParts&) const = default;
};

struct ModelIssue {
  std::string what;
};

// Structural validation; an empty report means the description satisfies
// every model invariant. Purely functional: the parts are not modified.
std::vector<ModelIssue> validate_model(const ModelParts& parts);

class GsmpModel {
public:
  GsmpModel() = default;  // empty; fill via compile

  // Requires validate_model(parts) to be clean; throws std::invalid_argument
  // listing the issues otherwise. Distributions are renormalized.
  static GsmpModel compile(ModelParts parts);

  std::size_t state_count() const { return state_names_.size(); }
  std::size_t event_count() const { return events_.size(); }

  const std::string& state_name(std::uint32_t s) const { return state_names_[s]; }
  const EventSpec& event(std::uint32_t e) const { return events_[e]; }
  std::optional<std::uint32_t> state_index(const std::string& name) const;
  std::optional<std::uint32_t> event_index(const std::string& name) const;

  const std::vector<std::uint32_t>& scheduled_events(std::uint32_t s) const {
    return scheduled_[s];
  }
  EventMask scheduled_mask(std::uint32_t s) const { return scheduled_mask_[s]; }
  bool is_scheduled(std::uint32_t s, std::uint32_t e) const {
    return (scheduled_mask_[s] >> e) & 1u;
  }

  struct Row {
    EventMask events;
    std::vector<std::pair<std::uint32_t, double>> targets;  // normalized, weight > 0
  };
  // nullptr when the (state, occurring set) pair has no successor row.
  const Row* find_row(std::uint32_t s, EventMask occurring) const;
  const std::vector<Row>& rows(std::uint32_t s) const { return rows_[s]; }

  const std::vector<std::pair<std::uint32_t, double>>& init() const { return init_; }

  // Rank of the event name in lexicographic order; used for tie-breaking.
  std::uint32_t lex_rank(std::uint32_t e) const { return lex_rank_[e]; }

  // B = max over the finite event bounds (0 when there is none).
  long long bound_b() const { return bound_b_; }

  std::string mask_names(EventMask mask) const;  // "a+b" style, ascending by name

  const ModelParts& parts() const { return parts_; }

private:
  ModelParts parts_;
  std::vector<std::string> state_names_;
  std::vector<EventSpec> events_;
  std::vector<std::vector<std::uint32_t>> scheduled_;
  std::vector<EventMask> scheduled_mask_;
  std::vector<std::vector<Row>> rows_;
  std::vector<std::pair<std::uint32_t, double>> init_;
  std::vector<std::uint32_t> lex_rank_;
  long long bound_b_ = 0;
};

}  // namespace gsmp
