#include "doctest.h"

#include <cmath>
#include <map>

#include "gsmp/library.hpp"
#include "gsmp/simulator.hpp"
#include "support/stats.hpp"

using namespace gsmp;

TEST_CASE("initial configuration of the clock-sync model") {
  const GsmpModel& m = get_model("ntp").model;
  RngStream rng(1);
  Configuration cfg = initial_configuration(m, rng);
  CHECK(m.state_name(cfg.state) == "Idle");
  CHECK(cfg.elapsed[*m.event_index("polling_d")] == 0.0);
  CHECK(cfg.elapsed[*m.event_index("stable_d")] == 0.0);
  CHECK(cfg.elapsed[*m.event_index("query")] == kUnscheduled);
  CHECK(cfg.last_step == 0.0);
}

TEST_CASE("initial draw over a two-point distribution") {
  ModelParts p = get_model("renewal-2").parts;
  p.init = {{"s1", 0.5}, {"s2", 0.5}};
  GsmpModel m = GsmpModel::compile(p);
  // scan for a seed whose first unit draw is above 0.5: that draw must pick
  // the second state by inverse CDF
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    double q = RngStream(seed).next_unit();
    RngStream rng(seed);
    Configuration cfg = initial_configuration(m, rng);
    CHECK(m.state_name(cfg.state) == (q < 0.5 ? "s1" : "s2"));
  }
}

TEST_CASE("deterministic first transition of the clock-sync model") {
  const GsmpModel& m = get_model("ntp").model;
  RngStream rng(7);
  Configuration cfg = initial_configuration(m, rng);
  StepResult res = step(m, cfg, rng);
  CHECK(res.dwell == 90.0);
  CHECK(res.occurring == EventMask(1) << *m.event_index("polling_d"));
  CHECK(m.state_name(res.next.state) == "Init");
  CHECK(res.next.elapsed[*m.event_index("query")] == 0.0);
  CHECK(res.next.elapsed[*m.event_index("stable_d")] == 90.0);
  CHECK(res.next.elapsed[*m.event_index("polling_d")] == kUnscheduled);
  CHECK(res.next.last_step == 90.0);
}

TEST_CASE("single fixed deadline fires deterministically") {
  ModelParts p;
  p.states = {"a"};
  p.events = {{"e", DelayLaw::make_fixed(1)}};
  p.schedule = {{"a", {"e"}}};
  p.succ = {{"a", {"e"}, {{"a", 1.0}}}};
  p.init = {{"a", 1.0}};
  GsmpModel m = GsmpModel::compile(p);
  Configuration cfg = make_configuration(m, "a", {{"e", 0.25}});
  RngStream rng(3);
  StepResult res = step(m, cfg, rng);
  CHECK(res.dwell == 0.75);
  CHECK(res.next.elapsed[0] == 0.0);
}

TEST_CASE("dwell distribution matches the residual survival") {
  // two racing uniforms; the event with support [2,3] cannot fire yet, so
  // P(dwell > 0.3) equals the first event's residual survival 0.625
  const GsmpModel& m = get_model("regions-demo").model;
  Configuration cfg = make_configuration(m, "s", {{"e", 0.2}, {"f", 0.7}});
  RngStream rng(99);
  const int n = 100000;
  int over = 0;
  for (int i = 0; i < n; ++i) {
    Configuration c = cfg;
    StepOutcome out = advance(m, c, rng);
    if (out.dwell > 0.3) ++over;
  }
  CHECK(static_cast<double>(over) / n == doctest::Approx(0.625).epsilon(0.008));
}

TEST_CASE("valuation rebuild: new zero, inherited advanced, old dropped") {
  for (const char* key : {"fig1-producer-consumer", "fig2-sink", "ntp", "chain-ticking"}) {
    const GsmpModel& m = get_model(key).model;
    RngStream rng(42);
    Configuration cfg = initial_configuration(m, rng);
    for (int i = 0; i < 2000; ++i) {
      Configuration before = cfg;
      StepOutcome out = advance(m, cfg, rng);
      EventMask sched_before = m.scheduled_mask(before.state);
      EventMask sched_after = m.scheduled_mask(cfg.state);
      for (std::uint32_t e = 0; e < m.event_count(); ++e) {
        EventMask bit = EventMask(1) << e;
        if (!(sched_after & bit)) {
          REQUIRE(cfg.elapsed[e] == kUnscheduled);
        } else if ((sched_before & bit) && !(out.occurring & bit)) {
          REQUIRE(cfg.elapsed[e] == before.elapsed[e] + out.dwell);
        } else {
          REQUIRE(cfg.elapsed[e] == 0.0);
        }
        // fixed-delay events never overshoot their deadline
        const DelayLaw& law = m.event(e).law;
        if ((sched_after & bit) && law.is_fixed())
          REQUIRE(cfg.elapsed[e] < static_cast<double>(*law.upper));
      }
      REQUIRE(out.dwell > 0.0);
      REQUIRE(cfg.last_step == out.dwell);
    }
  }
}

TEST_CASE("same seed replays the same trace bit for bit") {
  const GsmpModel& m = get_model("fig2-sink").model;
  auto run = [&] {
    RngStream rng(123456);
    RunOptions opts;
    opts.max_steps = 5000;
    opts.record_trace = true;
    return simulate_run(m, initial_configuration(m, rng), opts, rng);
  };
  RunResult a = run();
  RunResult b = run();
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].dwell == b.trace[i].dwell);
    CHECK(a.trace[i].state == b.trace[i].state);
    CHECK(a.trace[i].occurring == b.trace[i].occurring);
    CHECK(a.trace[i].elapsed == b.trace[i].elapsed);
  }
  CHECK(a.final_cfg == b.final_cfg);
}

TEST_CASE("run statistics") {
  const GsmpModel& m = get_model("renewal-2").model;

  SUBCASE("never visiting the target gives zero") {
    RngStream rng(5);
    RunOptions opts;
    opts.max_steps = 1001;
    opts.target_states = {};  // no target at all
    RunResult res = simulate_run(m, initial_configuration(m, rng), opts, rng);
    CHECK(res.stats.partial_d() == 0.0);
    CHECK(res.stats.partial_c() == 0.0);
  }

  SUBCASE("everything inside the target gives one") {
    RngStream rng(5);
    RunOptions opts;
    opts.max_steps = 500;
    opts.target_states = {0, 1};
    RunResult res = simulate_run(m, initial_configuration(m, rng), opts, rng);
    CHECK(res.stats.partial_c() == 1.0);
    for (const auto& cp : res.stats.checkpoints) CHECK(cp.partial_c == 1.0);
  }

  SUBCASE("renewal-reward long-run time ratio") {
    RngStream rng(20240811);
    RunOptions opts;
    opts.max_steps = 1000000;
    opts.target_states = {0};
    RunResult res = simulate_run(m, initial_configuration(m, rng), opts, rng);
    // E[uniform(0,1)] / (E[uniform(0,1)] + E[uniform(1,3)]) = 0.5 / 2.5
    CHECK(res.stats.partial_c() == doctest::Approx(0.2).epsilon(0.05));
    CHECK(std::abs(res.stats.partial_c() - 0.2) < 0.01);
    // strict alternation starting in the target state
    CHECK(res.stats.partial_d() == 0.5);
    for (const auto& cp : res.stats.checkpoints) {
      CHECK(cp.partial_d >= 0.0);
      CHECK(cp.partial_d <= 1.0);
      CHECK(cp.partial_c >= 0.0);
      CHECK(cp.partial_c <= 1.0);
    }
  }
}

TEST_CASE("time budget stops a run once the simulated time is spent") {
  const GsmpModel& m = get_model("renewal-2").model;
  RngStream rng(12);
  RunOptions opts;
  opts.max_steps = 1000000;
  opts.max_time = 250.0;
  RunResult res = simulate_run(m, initial_configuration(m, rng), opts, rng);
  CHECK(res.stats.time_total >= 250.0);
  // the mean cycle is 2.5 time units over two steps
  CHECK(res.stats.time_total < 250.0 + 3.0);
  CHECK(res.stats.steps < 1000000);
}

TEST_CASE("event distance") {
  const GsmpModel& m = get_model("regions-demo").model;
  auto dist = [&](double ve, double vf) {
    Configuration cfg = make_configuration(m, "s", {{"e", ve}, {"f", vf}});
    return event_distance(cfg, *m.event_index("e"), *m.event_index("f"));
  };
  CHECK(dist(0.2, 0.7) == doctest::Approx(0.5));
  CHECK(dist(0.4, 0.4) == 0.0);
  CHECK(dist(0.9, 0.1) == doctest::Approx(0.2));

  Configuration cfg = make_configuration(m, "s", {});
  cfg.elapsed[1] = kUnscheduled;
  CHECK_THROWS_AS(event_distance(cfg, 0, 1), std::invalid_argument);
}

TEST_CASE("phase segmentation over synthetic traces") {
  const GsmpModel& m = get_model("fig1-producer-consumer").model;
  std::uint32_t wait1 = *m.state_index("Wait1");
  std::uint32_t busy1 = *m.state_index("Busy1");
  std::uint32_t begin1 = *m.state_index("Begin1");
  std::uint32_t full1 = *m.state_index("Full1");
  std::uint32_t p = *m.event_index("p");
  std::uint32_t c = *m.event_index("c");

  auto row = [&](std::uint32_t state, double vp, double vc) {
    TraceRow r;
    r.step = 0;
    r.state = state;
    r.occurring = 0;
    r.dwell = 0.1;
    r.elapsed.assign(m.event_count(), kUnscheduled);
    r.elapsed[p] = vp;
    if (vc >= 0.0) r.elapsed[c] = vc;
    r.next_state = state;
    return r;
  };

  SUBCASE("one phase of four attempts") {
    Trace trace;
    trace.push_back(row(wait1, 0.1, -1.0));
    for (int k = 0; k < 4; ++k) {
      trace.push_back(row(begin1, 0.3, 0.0));
      trace.push_back(row(busy1, 0.0, 0.6));
      trace.push_back(row(full1, 0.2, 0.8));
    }
    auto phases = phase_tracker(m, trace, {wait1}, {busy1}, p, c);
    REQUIRE(phases.size() == 1);
    CHECK(phases[0].attempts == 4);
    CHECK(phases[0].start_distance == doctest::Approx(0.6));
  }

  SUBCASE("strong flags track distance halving") {
    Trace trace;
    for (double d : {0.4, 0.3, 0.1}) {
      trace.push_back(row(wait1, 0.1, -1.0));
      trace.push_back(row(busy1, 0.0, d));
    }
    auto phases = phase_tracker(m, trace, {wait1}, {busy1}, p, c);
    REQUIRE(phases.size() == 3);
    CHECK(phases[0].start_distance == doctest::Approx(0.4));
    CHECK_FALSE(phases[0].strong);  // 0.3 > 0.2
    CHECK(phases[1].strong);        // 0.1 <= 0.15
  }
}

TEST_CASE("empirical winner distribution matches the kernel integrals") {
  const GsmpModel& m = get_model("fig1-producer-consumer").model;
  Configuration cfg = make_configuration(m, "Busy1", {{"p", 0.0}, {"t", 0.0}, {"c", 0.4}});
  auto expected = testsupport::winner_probabilities(m, cfg);
  REQUIRE(expected.size() == 2);

  RngStream rng(31337);
  const int n = 100000;
  std::map<EventMask, std::uint64_t> counts;
  for (int i = 0; i < n; ++i) {
    Configuration c = cfg;
    counts[advance(m, c, rng).occurring] += 1;
  }
  std::vector<std::uint64_t> observed;
  std::vector<double> probs;
  for (const auto& [mask, pr] : expected) {
    observed.push_back(counts[mask]);
    probs.push_back(pr);
  }
  CHECK(testsupport::chi_square_p(observed, probs) > 0.001);
}

TEST_CASE("missing successor row raises") {
  ModelParts p = get_model("renewal-2").parts;
  p.succ.pop_back();  // drop the s2 row
  GsmpModel m = GsmpModel::compile(p);
  Configuration cfg = make_configuration(m, "s2", {{"e2", 0.5}});
  RngStream rng(3);
  CHECK_THROWS_AS(advance(m, cfg, rng), UnspecifiedSuccessor);
}
