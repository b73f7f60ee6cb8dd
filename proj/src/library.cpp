#include "gsmp/library.hpp"

#include <map>
#include <stdexcept>

namespace gsmp {

namespace {

ModelParts renewal_2() {
  ModelParts p;
  p.states = {"s1", "s2"};
  p.events = {{"e1", DelayLaw::make_uniform(0, 1)}, {"e2", DelayLaw::make_uniform(1, 3)}};
  p.schedule = {{"s1", {"e1"}}, {"s2", {"e2"}}};
  p.succ = {{"s1", {"e1"}, {{"s2", 1.0}}}, {"s2", {"e2"}, {{"s1", 1.0}}}};
  p.init = {{"s1", 1.0}};
  return p;
}

ModelParts regions_demo() {
  ModelParts p;
  p.states = {"s"};
  p.events = {{"e", DelayLaw::make_uniform(0, 1)}, {"f", DelayLaw::make_uniform(2, 3)}};
  p.schedule = {{"s", {"e", "f"}}};
  p.succ = {{"s", {"e"}, {{"s", 1.0}}}, {"s", {"f"}, {{"s", 1.0}}}};
  p.init = {{"s", 1.0}};
  return p;
}

// Producer-consumer line: production p and consumption c take exactly one
// time unit, transport t at most one. The consumer alternates between two
// modules; it switches whenever a transport outlasts every earlier one.
ModelParts producer_consumer_two_modules() {
  ModelParts p;
  p.states = {"Init", "Wait1", "Begin1", "Busy1", "Full1", "Wait2", "Begin2", "Busy2", "Full2"};
  p.events = {{"p", DelayLaw::make_fixed(1)},
              {"c", DelayLaw::make_fixed(1)},
              {"t", DelayLaw::make_uniform(0, 1)}};
  p.schedule = {{"Init", {"p"}},
                {"Wait1", {"p", "t"}},   {"Begin1", {"p", "c"}},
                {"Busy1", {"p", "t", "c"}}, {"Full1", {"p", "c"}},
                {"Wait2", {"p", "t"}},   {"Begin2", {"p", "c"}},
                {"Busy2", {"p", "t", "c"}}, {"Full2", {"p", "c"}}};
  p.succ = {{"Init", {"p"}, {{"Wait1", 1.0}}},
            {"Wait1", {"t"}, {{"Begin1", 1.0}}},
            {"Begin1", {"p"}, {{"Busy1", 1.0}}},
            {"Busy1", {"t"}, {{"Full1", 1.0}}},
            {"Busy1", {"c"}, {{"Wait2", 1.0}}},
            {"Full1", {"c"}, {{"Begin1", 1.0}}},
            {"Wait2", {"t"}, {{"Begin2", 1.0}}},
            {"Begin2", {"p"}, {{"Busy2", 1.0}}},
            {"Busy2", {"t"}, {{"Full2", 1.0}}},
            {"Busy2", {"c"}, {{"Wait1", 1.0}}},
            {"Full2", {"c"}, {{"Begin2", 1.0}}}};
  p.init = {{"Init", 1.0}};
  return p;
}

// One consumer module plus an escape event t' that can fire while the
// consumer waits and moves the system into an absorbing Sink.
ModelParts producer_consumer_sink(bool cycle_back) {
  ModelParts p;
  p.states = {"Init", "Wait", "Begin", "Busy", "Full", "Sink"};
  p.events = {{"p", DelayLaw::make_fixed(1)},
              {"c", DelayLaw::make_fixed(1)},
              {"t", DelayLaw::make_uniform(0, 1)},
              {"tp", DelayLaw::make_uniform(0, 1)}};
  p.schedule = {{"Init", {"p"}},
                {"Wait", {"p", "t", "tp"}},
                {"Begin", {"p", "c"}},
                {"Busy", {"p", "t", "c"}},
                {"Full", {"p", "c"}},
                {"Sink", {"p"}}};
  p.succ = {{"Init", {"p"}, {{"Wait", 1.0}}},
            {"Wait", {"t"}, {{"Begin", 1.0}}},
            {"Wait", {"tp"}, {{"Sink", 1.0}}},
            {"Begin", {"p"}, {{"Busy", 1.0}}},
            {"Busy", {"t"}, {{"Full", 1.0}}},
            {"Busy", {"c"}, {{"Wait", 1.0}}},
            {"Full", {"c"}, {{"Begin", 1.0}}},
            {"Sink", {"p"}, {{cycle_back ? "Init" : "Sink", 1.0}}}};
  p.init = {{"Init", 1.0}};
  return p;
}

// Clock-synchronization client: polling and stable-time are long fixed
// delays, the query/response exchange must beat a one-unit round-trip
// deadline, late responses push the client into unsynchronized states.
ModelParts ntp() {
  ModelParts p;
  p.states = {"Idle", "Init", "QSent", "Sync", "InitLate", "QSentLate"};
  p.events = {{"polling_d", DelayLaw::make_fixed(90)},
              {"stable_d", DelayLaw::make_fixed(100)},
              {"roundtrip_d", DelayLaw::make_fixed(1)},
              {"query", DelayLaw::make_uniform(0, 1)},
              {"response", DelayLaw::make_uniform(0, 2)},
              {"sync", DelayLaw::make_uniform(0, 1)}};
  p.schedule = {{"Idle", {"polling_d", "stable_d"}},
                {"Init", {"query", "stable_d"}},
                {"QSent", {"response", "roundtrip_d", "stable_d"}},
                {"Sync", {"sync"}},
                {"InitLate", {"query"}},
                {"QSentLate", {"response", "roundtrip_d"}}};
  p.succ = {{"Idle", {"polling_d"}, {{"Init", 1.0}}},
            {"Init", {"query"}, {{"QSent", 1.0}}},
            {"Init", {"stable_d"}, {{"InitLate", 1.0}}},
            {"QSent", {"response"}, {{"Sync", 1.0}}},
            {"QSent", {"roundtrip_d"}, {{"Init", 1.0}}},
            {"QSent", {"stable_d"}, {{"QSentLate", 1.0}}},
            {"Sync", {"sync"}, {{"Idle", 1.0}}},
            {"InitLate", {"query"}, {{"QSentLate", 1.0}}},
            {"QSentLate", {"response"}, {{"Sync", 1.0}}},
            {"QSentLate", {"roundtrip_d"}, {{"InitLate", 1.0}}}};
  p.init = {{"Idle", 1.0}};
  return p;
}

// Ticking clock e that occasionally launches a fixed chain e -> f -> g,
// re-armed through a variable cooldown so only e re-schedules itself.
ModelParts chain_ticking() {
  ModelParts p;
  p.states = {"Tick", "Load", "Hold", "Burst", "Cool"};
  p.events = {{"e", DelayLaw::make_fixed(1)},
              {"f", DelayLaw::make_fixed(2)},
              {"g", DelayLaw::make_fixed(1)},
              {"v", DelayLaw::make_uniform(0, 1)}};
  p.schedule = {{"Tick", {"e"}},
                {"Load", {"f", "v"}},
                {"Hold", {"f", "v"}},
                {"Burst", {"g"}},
                {"Cool", {"v"}}};
  p.succ = {{"Tick", {"e"}, {{"Tick", 0.5}, {"Load", 0.5}}},
            {"Load", {"v"}, {{"Hold", 1.0}}},
            {"Hold", {"v"}, {{"Hold", 1.0}}},
            {"Hold", {"f"}, {{"Burst", 1.0}}},
            {"Burst", {"g"}, {{"Cool", 1.0}}},
            {"Cool", {"v"}, {{"Tick", 1.0}}}};
  p.init = {{"Tick", 1.0}};
  return p;
}

std::map<std::string, NamedModel> build_catalog() {
  std::map<std::string, NamedModel> catalog;
  auto put = [&](std::string key, ModelParts parts, std::string provenance,
                 std::vector<ExpectedProperty> expected) {
    NamedModel nm;
    nm.key = key;
    nm.model = GsmpModel::compile(parts);
    nm.parts = std::move(parts);
    nm.provenance = std::move(provenance);
    nm.expected = std::move(expected);
    catalog.emplace(std::move(key), std::move(nm));
  };

  put("renewal-2", renewal_2(),
      "alternating renewal process with uniform(0,1) and uniform(1,3) holding times",
      {{"single-ticking", "true", "no fixed-delay events"},
       {"c(s1)", "0.2", "renewal reward: 0.5 / (0.5 + 2.0)"},
       {"d(s1)", "0.5", "strict alternation"}});

  put("regions-demo", regions_demo(),
      "two racing uniform events on [0,1] and [2,3] over a single state",
      {{"single-ticking", "true", "no fixed-delay events"}});

  put("fig1-producer-consumer", producer_consumer_two_modules(),
      "producer-consumer with two consumer modules; the module switch happens exactly when a "
      "transport sets a new duration record, so module sojourns keep lengthening",
      {{"single-ticking", "false", "p and c both re-schedule themselves"},
       {"causes", "(p,p),(c,c)", "self-scheduling production and consumption"}});

  put("fig2-sink", producer_consumer_sink(false),
      "single-module producer-consumer with an escape event in the waiting state leading to an "
      "absorbing Sink; the Sink is reached with probability strictly below one",
      {{"single-ticking", "false", "p and c both re-schedule themselves"},
       {"sink-bscc", "true", "Sink self-loop is the only bottom component"}});

  put("fig2-cycled", producer_consumer_sink(true),
      "the sink variant with the Sink self-loop replaced by a return to Init, which makes the "
      "whole region graph one strongly connected component",
      {{"single-ticking", "false", "p and c both re-schedule themselves"},
       {"single-scc", "true", "Sink feeds back into Init"}});

  put("ntp", ntp(),
      "clock-synchronization client reconstructed from the informal protocol description: "
      "polling delay 90, stable-time 100, round-trip deadline 1; quantitative outputs are "
      "regression-tested across seeds only",
      {{"single-ticking", "true", "no fixed-delay event re-schedules a fixed-delay event"},
       {"bound-b", "100", "largest fixed delay"}});

  put("chain-ticking", chain_ticking(),
      "hand-built single-ticking chain: e re-schedules itself and launches f, f launches g, the "
      "return path runs through a variable-delay cooldown",
      {{"single-ticking", "true", "causes relation is (e,e),(e,f),(f,g)"},
       {"ticking-event", "e", "the only self-scheduling fixed event"}});

  return catalog;
}

}  // namespace

const NamedModel& get_model(const std::string& key) {
  static const std::map<std::string, NamedModel> catalog = build_catalog();
  auto it = catalog.find(key);
  if (it == catalog.end()) throw std::out_of_range("unknown model key: " + key);
  return it->second;
}

std::vector<std::string> model_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    out.reserve(8);
    for (const auto& k :
         {"chain-ticking", "fig1-producer-consumer", "fig2-cycled", "fig2-sink", "ntp",
          "regions-demo", "renewal-2"})
      out.push_back(k);
    return out;
  }();
  return keys;
}

}  // namespace gsmp
