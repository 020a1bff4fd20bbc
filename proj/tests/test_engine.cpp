#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "support.hpp"

namespace yardtwin {
namespace {

using test::event;
using test::slot;
using test::ts;

SimulationJob job_for(const EventLog& log, std::string strategy, std::uint64_t seed,
                      nlohmann::json params = nlohmann::json::object()) {
  SimulationJob job;
  job.job_id = "t";
  job.window = {log.events.front().timestamp, log.events.back().timestamp};
  job.strategy = StrategySpec{std::move(strategy), std::move(params)};
  job.seed = seed;
  return job;
}

TEST(ApplyEvent, ArrivalShiftDeparture) {
  const YardLayout layout = test::golden_layout();
  YardState s(layout);
  s = apply_event(s, event(EventKind::GateIn, "2024-03-01T08:00:00Z", "C1", std::nullopt, slot("A.01.1.1")));
  EXPECT_TRUE(s.in_yard("C1"));
  EXPECT_EQ(s.in_yard_count(), 1u);
  EXPECT_EQ(s.clock(), ts("2024-03-01T08:00:00Z"));
  s = apply_event(s, event(EventKind::YardShift, "2024-03-01T08:05:00Z", "C1", slot("A.01.1.1"), slot("A.01.2.1")));
  EXPECT_EQ(s.container("C1").rehandle_count, 1);
  EXPECT_EQ(s.container("C1").current_slot, slot("A.01.2.1"));
  s = apply_event(s, event(EventKind::CranePos, "2024-03-01T08:06:00Z", std::nullopt, std::nullopt,
                           slot("A.07.1.1"), "RTG-9"));
  EXPECT_EQ(s.equipment_position("RTG-9"), slot("A.07.1.1"));
  s = apply_event(s, event(EventKind::VesselLoad, "2024-03-01T08:10:00Z", "C1", slot("A.01.2.1"), std::nullopt));
  EXPECT_FALSE(s.in_yard("C1"));
  EXPECT_EQ(s.in_yard_count(), 0u);
}

TEST(ApplyEvent, BlockedDepartureFailsWithSeq) {
  YardState s(test::golden_layout());
  auto e1 = event(EventKind::GateIn, "2024-03-01T08:00:00Z", "C1", std::nullopt, slot("A.01.1.1"));
  auto e2 = event(EventKind::GateIn, "2024-03-01T08:01:00Z", "C2", std::nullopt, slot("A.01.1.2"));
  auto e3 = event(EventKind::GateOut, "2024-03-01T08:02:00Z", "C1", slot("A.01.1.1"), std::nullopt);
  e3.seq = 17;
  apply(s, e1);
  apply(s, e2);
  try {
    apply(s, e3);
    FAIL();
  } catch (const YardError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotTopmost);
    EXPECT_EQ(e.seq(), 17u);
  }
  auto wrong = event(EventKind::GateOut, "2024-03-01T08:03:00Z", "C1", slot("A.01.1.2"), std::nullopt);
  EXPECT_THROW(apply(s, wrong), YardError);
  EXPECT_TRUE(s.in_yard("C2"));
}

TEST(Replay, OneFramePerEvent) {
  const EventLog log = test::golden_log();
  const YardLayout layout = test::golden_layout();
  const TimeWindow all{log.events.front().timestamp, log.events.back().timestamp};
  const auto frames = replay(log, layout, all);
  ASSERT_EQ(frames.size(), 12u);
  YardState folded(layout);
  for (const YardEvent& e : log.events) folded = apply_event(folded, e);
  EXPECT_EQ(frames.back().state, folded);
  EXPECT_EQ(frames.back().state.in_yard_count(), 2u);
  EXPECT_EQ(frames[3].state.stack_heights("A", 1), (std::vector<int>{3, 0, 0}));
}

TEST(Replay, TwiceIsByteIdentical) {
  const EventLog log = test::golden_log();
  const YardLayout layout = test::golden_layout();
  const TimeWindow all{log.events.front().timestamp, log.events.back().timestamp};
  const auto a = replay(log, layout, all);
  const auto b = replay(log, layout, all);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(snapshot_to_json(a[i].state).dump(), snapshot_to_json(b[i].state).dump());
  }
}

TEST(Replay, EmptyWindowYieldsInitialSnapshot) {
  const EventLog log = test::golden_log();
  const auto frames = replay(log, test::golden_layout(), {ts("2024-02-01T00:00:00Z"), ts("2024-02-02T00:00:00Z")});
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].state.in_yard_count(), 0u);
  EXPECT_EQ(frames[0].boundary, ts("2024-02-01T00:00:00Z"));
  // A window between events warm-starts from everything before it.
  const auto mid = replay(log, test::golden_layout(), {ts("2024-03-01T08:35:00Z"), ts("2024-03-01T08:40:00Z")});
  ASSERT_EQ(mid.size(), 1u);
  EXPECT_EQ(mid[0].state.in_yard_count(), 4u);
}

TEST(Replay, HourStepFrames) {
  const EventLog log = test::golden_log();
  const auto frames = replay(log, test::golden_layout(), {ts("2024-03-01T08:00:00Z"), ts("2024-03-01T12:00:00Z")},
                             Step::Hour);
  ASSERT_EQ(frames.size(), 4u);
  EXPECT_EQ(frames[0].boundary, ts("2024-03-01T09:00:00Z"));
  EXPECT_EQ(frames[0].state.in_yard_count(), 4u);
  EXPECT_EQ(frames[1].state.in_yard_count(), 3u);  // C1 out at 09:15
  EXPECT_EQ(frames[3].boundary, ts("2024-03-01T12:00:00Z"));
  EXPECT_EQ(frames[3].state.in_yard_count(), 2u);
  EXPECT_EQ(frames[3].state.clock(), ts("2024-03-01T12:00:00Z"));
}

TEST(Replay, HaltsWithSeqAndCause) {
  EventLog log = test::golden_log();
  log.events[7].from_slot = slot("A.01.1.2");  // GATE_OUT C1 from an empty tier
  try {
    replay(log, test::golden_layout(), {log.events.front().timestamp, log.events.back().timestamp});
    FAIL();
  } catch (const YardError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ReplayHalted);
    EXPECT_EQ(e.seq(), 7u);
    EXPECT_EQ(e.cause(), ErrorCode::SlotEmpty);
  }
}

TEST(ReplayTo, StateAtTime) {
  const EventLog log = test::golden_log();
  const YardState s = replay_to(log, test::golden_layout(), ts("2024-03-01T09:12:00Z"));
  EXPECT_EQ(s.clock(), ts("2024-03-01T09:12:00Z"));
  EXPECT_EQ(s.container("CMAU0000002").current_slot, slot("A.01.2.2"));
  EXPECT_EQ(s.equipment_position("RTG-01"), slot("A.01.2.2"));
}

TEST(Counterfactual, NeverBlockedDemandNeedsNoShifts) {
  const YardLayout layout({{"A", 2, 2, 3, 6.5, 2.9}});
  EventLog log;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "C" + std::to_string(i);
    log.events.push_back(event(EventKind::GateIn, "2024-03-01T08:00:00Z", id, std::nullopt, slot("A.01.1.1")));
    log.events.back().timestamp.seconds += i * 120;
    log.events.push_back(event(EventKind::GateOut, "2024-03-01T08:01:00Z", id, slot("A.01.1.1"), std::nullopt));
    log.events.back().timestamp.seconds += i * 120;
  }
  for (std::size_t i = 0; i < log.events.size(); ++i) log.events[i].seq = i;
  for (const char* name : {"random_feasible", "lowest_tier", "category_segregation", "nearest_slot"}) {
    const SimulatedLog sim = counterfactual_run(log, layout, job_for(log, name, 3));
    EXPECT_EQ(std::count_if(sim.events.events.begin(), sim.events.events.end(),
                            [](const YardEvent& e) { return e.synthetic; }),
              0)
        << name;
    EXPECT_EQ(sim.events.events.size(), 12u);
  }
}

TEST(Counterfactual, SingleStackCannotRelocate) {
  const YardLayout layout({{"A", 1, 1, 3, 6.5, 2.9}});
  const EventLog log = parse_log(
      "{\"ts\":\"2024-03-01T08:00:00Z\",\"kind\":\"GATE_IN\",\"container\":\"C1\",\"to\":\"A.01.1.1\"}\n"
      "{\"ts\":\"2024-03-01T08:01:00Z\",\"kind\":\"GATE_IN\",\"container\":\"C2\",\"to\":\"A.01.1.2\"}\n"
      "{\"ts\":\"2024-03-01T08:02:00Z\",\"kind\":\"GATE_OUT\",\"container\":\"C1\",\"from\":\"A.01.1.1\"}\n");
  try {
    counterfactual_run(log, layout, job_for(log, "lowest_tier", 1));
    FAIL();
  } catch (const YardError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasibleSlot);
    EXPECT_EQ(e.seq(), 2u);
  }
}

TEST(Counterfactual, SeededRunsAreIdentical) {
  const YardLayout layout = workload::study_layout();
  const EventLog log = workload::realize(workload::grouped_departures(layout, 120, 4, 5), layout, 5);
  const auto a = counterfactual_run(log, layout, job_for(log, "random_feasible", 99));
  const auto b = counterfactual_run(log, layout, job_for(log, "random_feasible", 99));
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize_log(a.events), serialize_log(b.events));
  const auto c = counterfactual_run(log, layout, job_for(log, "random_feasible", 100));
  EXPECT_NE(serialize_log(a.events), serialize_log(c.events));
}

TEST(Counterfactual, IdentityReproducesWindow) {
  const EventLog log = test::golden_log();
  const auto sim = counterfactual_run(log, test::golden_layout(), job_for(log, "identity", 0));
  ASSERT_EQ(sim.events.events.size(), log.events.size());
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    YardEvent expected = log.events[i];
    expected.seq = i;
    EXPECT_EQ(sim.events.events[i], expected);
  }
}

TEST(Counterfactual, UnknownStrategyRejected) {
  const EventLog log = test::golden_log();
  try {
    counterfactual_run(log, test::golden_layout(), job_for(log, "tetris", 0));
    FAIL();
  } catch (const YardError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidStrategy);
  }
}

using Demand = std::multiset<std::tuple<std::string, std::int64_t, bool>>;

Demand demand_of(const std::vector<YardEvent>& events, const TimeWindow& w) {
  Demand d;
  for (const YardEvent& e : events) {
    if (!w.contains(e.timestamp)) continue;
    if (is_arrival(e.kind) || is_departure(e.kind)) d.emplace(*e.container_id, e.timestamp.seconds, is_arrival(e.kind));
  }
  return d;
}

// Demand conservation, shift justification and replayability over several
// strategies, seeds and a mid-log window (warm start).
TEST(CounterfactualProperty, ConservesDemandAndJustifiesShifts) {
  const YardLayout layout = workload::study_layout();
  const EventLog log = workload::realize(workload::rolling(layout, 300, 21), layout, 21);
  const TimeWindow window{Timestamp{log.events.front().timestamp.seconds + 20 * kSecondsPerHour},
                          Timestamp{log.events.back().timestamp.seconds - 10 * kSecondsPerHour}};
  for (const char* name : {"random_feasible", "lowest_tier", "category_segregation", "nearest_slot"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      SimulationJob job = job_for(log, name, seed);
      job.window = window;
      const SimulatedLog sim = counterfactual_run(log, layout, job);
      EXPECT_EQ(demand_of(sim.events.events, window), demand_of(log.events, window)) << name;

      const EventLog full = with_warm_start(log, sim);
      YardState state(layout);
      for (std::size_t i = 0; i < full.events.size(); ++i) {
        const YardEvent& e = full.events[i];
        if (e.synthetic) {
          std::size_t j = i + 1;
          while (full.events[j].synthetic) ++j;
          const YardEvent& dep = full.events[j];
          ASSERT_TRUE(is_departure(dep.kind));
          const SlotAddress target = *state.container(*dep.container_id).current_slot;
          ASSERT_EQ(e.from_slot->stack(), target.stack());
          ASSERT_GT(e.from_slot->tier, target.tier);
          ASSERT_NE(e.to_slot->stack(), target.stack());
          ASSERT_EQ(e.to_slot->block_id, target.block_id);  // default scope: same block
        }
        ASSERT_NO_THROW(apply(state, e));
      }
    }
  }
}

TEST(Counterfactual, WarmStartKeepsLoggedPositions) {
  const EventLog log = test::golden_log();
  SimulationJob job = job_for(log, "lowest_tier", 0);
  job.window = {ts("2024-03-01T09:01:00Z"), ts("2024-03-01T12:00:00Z")};
  const SimulatedLog sim = counterfactual_run(log, test::golden_layout(), job);
  // C1 at A.01.1.1 under C2 and C3: departing it needs two synthetic shifts.
  const auto& ev = sim.events.events;
  ASSERT_GE(ev.size(), 3u);
  EXPECT_TRUE(ev[0].synthetic);
  EXPECT_EQ(ev[0].container_id, "CMAU0000003");
  EXPECT_EQ(ev[0].from_slot, slot("A.01.1.3"));
  EXPECT_TRUE(ev[1].synthetic);
  EXPECT_EQ(ev[1].container_id, "CMAU0000002");
  EXPECT_EQ(ev[2].kind, EventKind::GateOut);
  EXPECT_EQ(ev[2].from_slot, slot("A.01.1.1"));
  // lowest_tier sends both blockers to ground slots of bay 1 first.
  EXPECT_EQ(ev[0].to_slot, slot("A.01.2.1"));
  EXPECT_EQ(ev[1].to_slot, slot("A.01.3.1"));
}

}  // namespace
}  // namespace yardtwin
