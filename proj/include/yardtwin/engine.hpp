#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "yardtwin/error.hpp"
#include "yardtwin/events.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/rng.hpp"
#include "yardtwin/strategies.hpp"
#include "yardtwin/time.hpp"
#include "yardtwin/yard_state.hpp"

namespace yardtwin {

enum class Step { Event, Hour, Day };

constexpr std::string_view step_name(Step s) {
  switch (s) {
    case Step::Event: return "EVENT";
    case Step::Hour: return "HOUR";
    case Step::Day: return "DAY";
  }
  return "?";
}

inline Step step_from_name(std::string_view name) {
  if (name == "EVENT") return Step::Event;
  if (name == "HOUR") return Step::Hour;
  if (name == "DAY") return Step::Day;
  fail(ErrorCode::BadWindow, "step must be EVENT, HOUR or DAY, got '" + std::string(name) + "'");
}

namespace detail {

[[noreturn]] inline void rethrow_with_seq(const YardError& e, std::uint64_t seq) {
  throw YardError(e.code(), "seq " + std::to_string(seq) + ": " + e.what(), seq, e.cause());
}

inline void require_occupant(const YardState& state, const SlotAddress& slot, const std::string& id) {
  const auto occupant = state.at(slot);
  if (!occupant) fail(ErrorCode::SlotEmpty, format_slot(slot) + " is empty, expected " + id);
  if (*occupant != id) {
    fail(ErrorCode::SlotMismatch, format_slot(slot) + " holds " + *occupant + ", not " + id);
  }
}

}  // namespace detail

/// Mirrors one event onto the state in place. Any failure leaves `state`
/// untouched and is rethrown with the event's seq attached.
inline void apply(YardState& state, const YardEvent& e) {
  try {
    switch (e.kind) {
      case EventKind::GateIn:
      case EventKind::VesselDischarge:
        state.place(record_from_arrival(e), *e.to_slot);
        break;
      case EventKind::GateOut:
      case EventKind::VesselLoad:
        detail::require_occupant(state, *e.from_slot, *e.container_id);
        state.remove(*e.from_slot);
        break;
      case EventKind::YardShift:
        detail::require_occupant(state, *e.from_slot, *e.container_id);
        state.shift(*e.from_slot, *e.to_slot);
        break;
      case EventKind::CranePos:
        break;
    }
    if (e.equipment_id) {
      const auto& pos = e.to_slot ? *e.to_slot : *e.from_slot;
      state.set_equipment_position(*e.equipment_id, pos);
    }
  } catch (const YardError& err) {
    detail::rethrow_with_seq(err, e.seq);
  }
  state.set_clock(e.timestamp);
}

inline YardState apply_event(YardState state, const YardEvent& e) {
  apply(state, e);
  return state;
}

namespace detail {

inline void apply_or_halt(YardState& state, const YardEvent& e) {
  try {
    apply(state, e);
  } catch (const YardError& err) {
    throw YardError(ErrorCode::ReplayHalted, std::string("ReplayHalted: ") + err.what(), e.seq, err.code());
  }
}

}  // namespace detail

struct Frame {
  Timestamp boundary;
  YardState state;
};

/// State after every event with timestamp <= t; the clock reads t.
inline YardState replay_to(const EventLog& log, const YardLayout& layout, Timestamp t) {
  YardState state(layout);
  for (const YardEvent& e : log.events) {
    if (t < e.timestamp) break;
    detail::apply_or_halt(state, e);
  }
  state.set_clock(t);
  return state;
}

/// Snapshots at each step boundary of the window. Events before the window
/// are applied first (warm start). With Step::Event there is one frame per
/// windowed event, or a single frame at window.from when no event falls in
/// the window. Hour/Day frames sit at from+n*step and at window.to.
inline std::vector<Frame> replay(const EventLog& log, const YardLayout& layout, const TimeWindow& window,
                                 Step step = Step::Event) {
  auto shared = std::make_shared<const YardLayout>(layout);
  YardState state(shared);
  std::size_t next = 0;
  const auto& events = log.events;
  while (next < events.size() && events[next].timestamp < window.from) {
    detail::apply_or_halt(state, events[next++]);
  }
  std::vector<Frame> frames;
  if (step == Step::Event) {
    for (; next < events.size() && window.contains(events[next].timestamp); ++next) {
      detail::apply_or_halt(state, events[next]);
      frames.push_back({events[next].timestamp, state});
    }
    if (frames.empty()) {
      state.set_clock(window.from);
      frames.push_back({window.from, state});
    }
    return frames;
  }
  const std::int64_t stride = step == Step::Hour ? kSecondsPerHour : kSecondsPerDay;
  std::vector<Timestamp> boundaries;
  for (Timestamp b{window.from.seconds + stride}; b < window.to; b.seconds += stride) boundaries.push_back(b);
  boundaries.push_back(window.to);
  for (Timestamp b : boundaries) {
    while (next < events.size() && events[next].timestamp <= b) detail::apply_or_halt(state, events[next++]);
    state.set_clock(b);
    frames.push_back({b, state});
  }
  return frames;
}

enum class JobStatus { Pending, Running, Done, Failed };

constexpr std::string_view status_name(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return "PENDING";
    case JobStatus::Running: return "RUNNING";
    case JobStatus::Done: return "DONE";
    case JobStatus::Failed: return "FAILED";
  }
  return "?";
}

struct SimulationJob {
  std::string job_id;
  TimeWindow window;
  Step step = Step::Event;
  StrategySpec strategy;
  std::uint64_t seed = 0;
  JobStatus status = JobStatus::Pending;
};

/// Strategy-driven replay of the window's demand. Synthetic relocations carry
/// synthetic=true.
struct SimulatedLog {
  TimeWindow window;
  EventLog events;

  friend bool operator==(const SimulatedLog&, const SimulatedLog&) = default;
};

/// Same arrivals and departures as the logged window, but slots come from the
/// strategy and blockers above a departing container are relocated by it, one
/// synthetic YARD_SHIFT each, top first. Logged shifts inside the window are
/// the real yard's own rehandles and are not carried over. Containers present
/// before window.from start at their logged positions. The "identity"
/// strategy reproduces the logged window verbatim.
inline SimulatedLog counterfactual_run(const EventLog& log, const YardLayout& layout, const SimulationJob& job) {
  const Strategy strategy = Strategy::from_spec(job.strategy);
  YardState state(layout);
  Rng rng(job.seed);
  SimulatedLog out{job.window, {}};
  auto emit = [&](YardEvent e) {
    e.seq = out.events.events.size();
    detail::apply_or_halt(state, e);
    out.events.events.push_back(std::move(e));
  };

  for (const YardEvent& e : log.events) {
    if (job.window.to < e.timestamp) break;
    if (e.timestamp < job.window.from) {
      detail::apply_or_halt(state, e);
      continue;
    }
    if (strategy.kind() == StrategyKind::Identity || e.kind == EventKind::CranePos) {
      emit(e);
      continue;
    }
    try {
      if (is_arrival(e.kind)) {
        PlacementContext ctx;
        ctx.preferred_block = e.to_slot->block_id;
        if (e.equipment_id) ctx.crane_position = state.equipment_position(*e.equipment_id);
        YardEvent placed = e;
        placed.to_slot = strategy.choose_placement(state, record_from_arrival(e), rng, ctx);
        emit(std::move(placed));
      } else if (is_departure(e.kind)) {
        const ContainerRecord* rec = state.find(*e.container_id);
        if (rec == nullptr || !rec->current_slot) {
          fail(ErrorCode::UnknownContainer, *e.container_id + " is not in the simulated yard");
        }
        const SlotAddress target = *rec->current_slot;
        const StackId stack = target.stack();
        while (state.height(stack) > target.tier) {
          const SlotAddress top{stack.block_id, stack.bay, stack.row, state.height(stack)};
          const ContainerRecord& blocker = state.container(*state.at(top));
          YardEvent shift;
          shift.timestamp = e.timestamp;
          shift.kind = EventKind::YardShift;
          shift.container_id = blocker.container_id;
          shift.from_slot = top;
          shift.to_slot = strategy.choose_relocation(state, blocker, stack, rng);
          shift.equipment_id = e.equipment_id;
          shift.synthetic = true;
          emit(std::move(shift));
        }
        YardEvent departed = e;
        departed.from_slot = target;
        emit(std::move(departed));
      }
    } catch (const YardError& err) {
      if (err.code() == ErrorCode::ReplayHalted) throw;
      throw YardError(err.code(), "seq " + std::to_string(e.seq) + ": " + err.what(), e.seq, err.cause());
    }
  }
  return out;
}

/// Real events before the window followed by the simulated window: the
/// replayable form of a counterfactual run. Seqs are renumbered in order.
inline EventLog with_warm_start(const EventLog& real, const SimulatedLog& simulated) {
  EventLog out;
  for (const YardEvent& e : real.events) {
    if (!(e.timestamp < simulated.window.from)) break;
    out.events.push_back(e);
  }
  out.events.insert(out.events.end(), simulated.events.events.begin(), simulated.events.events.end());
  for (std::size_t i = 0; i < out.events.size(); ++i) out.events[i].seq = i;
  return out;
}

}  // namespace yardtwin
