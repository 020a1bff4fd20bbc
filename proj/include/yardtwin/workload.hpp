#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "yardtwin/engine.hpp"
#include "yardtwin/events.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/rng.hpp"
#include "yardtwin/time.hpp"

// Synthetic demand for tests, demos and strategy studies. A demand log holds
// arrivals and departures whose slots are placeholders (tier-1 of bay 1, row
// 1 of the intended block); realize() turns it into a replayable log.

namespace yardtwin::workload {

inline Timestamp epoch() { return parse_timestamp("2024-03-01T00:00:00Z"); }

inline std::string container_name(std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 7) digits.insert(0, 7 - digits.size(), '0');
  return "SYNU" + digits;
}

inline SlotAddress placeholder(const BlockSpec& b) { return SlotAddress{b.block_id, 1, 1, 1}; }

inline std::string crane_of(const BlockSpec& b) { return "RTG-" + b.block_id; }

inline void finish(EventLog& log) {
  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const YardEvent& a, const YardEvent& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < log.events.size(); ++i) log.events[i].seq = i;
}

/// Three-block layout used by the strategy studies: 6 bays x 4 rows x 4 tiers
/// per block.
inline YardLayout study_layout() {
  return YardLayout({{"A", 6, 4, 4, 6.5, 2.9}, {"B", 6, 4, 4, 6.5, 2.9}, {"C", 6, 4, 4, 6.5, 2.9}});
}

/// All containers arrive first (one every 10 minutes, groups interleaved at
/// random), then each group leaves as one vessel call, in random order within
/// the group. Group g ships to port "P<g+1>".
inline EventLog grouped_departures(const YardLayout& layout, std::size_t containers, int groups, std::uint64_t seed) {
  Rng rng(seed);
  EventLog log;
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(groups));
  std::vector<const BlockSpec*> block_of(containers);
  const Timestamp start = epoch();
  const std::int64_t gap = 600;
  const Timestamp loading{start.seconds + static_cast<std::int64_t>(containers) * gap + kSecondsPerHour};
  for (std::size_t i = 0; i < containers; ++i) {
    const auto g = static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(groups)));
    const BlockSpec& b = layout.blocks()[rng.uniform_index(layout.blocks().size())];
    YardEvent e;
    e.timestamp = Timestamp{start.seconds + static_cast<std::int64_t>(i) * gap};
    e.kind = rng.uniform_index(2) == 0 ? EventKind::GateIn : EventKind::VesselDischarge;
    e.container_id = container_name(i);
    e.to_slot = placeholder(b);
    e.equipment_id = crane_of(b);
    e.attrs = {{"iso_type", i % 3 == 0 ? "45G1" : "22G1"},
               {"destination_port", "P" + std::to_string(g + 1)},
               {"departure_booked", true},
               {"departure_time", format_timestamp(Timestamp{loading.seconds + static_cast<std::int64_t>(g) * kSecondsPerDay})}};
    members[g].push_back(i);
    block_of[i] = &b;
    log.events.push_back(std::move(e));
  }
  for (std::size_t g = 0; g < members.size(); ++g) {
    auto& ids = members[g];
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.uniform_index(i)]);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t index = ids[i];
      YardEvent e;
      e.timestamp = Timestamp{loading.seconds + static_cast<std::int64_t>(g) * kSecondsPerDay +
                              static_cast<std::int64_t>(i) * 300};
      e.kind = EventKind::VesselLoad;
      e.container_id = container_name(index);
      e.from_slot = placeholder(*block_of[index]);
      e.equipment_id = crane_of(*block_of[index]);
      log.events.push_back(std::move(e));
    }
  }
  finish(log);
  return log;
}

/// Steady flow: one arrival every 30 minutes, each staying between 1 hour and
/// `max_dwell_hours`, with a crane position report every tenth arrival.
inline EventLog rolling(const YardLayout& layout, std::size_t containers, std::uint64_t seed,
                        std::int64_t max_dwell_hours = 96) {
  Rng rng(seed);
  EventLog log;
  const Timestamp start = epoch();
  for (std::size_t i = 0; i < containers; ++i) {
    const BlockSpec& b = layout.blocks()[rng.uniform_index(layout.blocks().size())];
    const Timestamp arrival{start.seconds + static_cast<std::int64_t>(i) * 1800};
    const std::int64_t dwell =
        kSecondsPerHour + static_cast<std::int64_t>(rng.uniform_index(
                              static_cast<std::uint64_t>((max_dwell_hours - 1) * kSecondsPerHour)));
    YardEvent in;
    in.timestamp = arrival;
    in.kind = rng.uniform_index(2) == 0 ? EventKind::GateIn : EventKind::VesselDischarge;
    in.container_id = container_name(i);
    in.to_slot = placeholder(b);
    in.equipment_id = crane_of(b);
    in.attrs = {{"iso_type", "22G1"}, {"origin_port", "P" + std::to_string(1 + rng.uniform_index(5))}};
    YardEvent out;
    out.timestamp = Timestamp{arrival.seconds + dwell};
    out.kind = rng.uniform_index(2) == 0 ? EventKind::GateOut : EventKind::VesselLoad;
    out.container_id = in.container_id;
    out.from_slot = placeholder(b);
    out.equipment_id = in.equipment_id;
    log.events.push_back(std::move(in));
    log.events.push_back(std::move(out));
    if (i % 10 == 9) {
      YardEvent ping;
      ping.timestamp = Timestamp{arrival.seconds + 60};
      ping.kind = EventKind::CranePos;
      ping.to_slot = SlotAddress{b.block_id, 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(b.bay_count))), 1, 1};
      ping.equipment_id = crane_of(b);
      log.events.push_back(std::move(ping));
    }
  }
  finish(log);
  return log;
}

/// Plays a demand log through random_feasible placement so every slot is
/// legal, keeping the relocations it needed as ordinary logged shifts.
inline EventLog realize(const EventLog& demand, const YardLayout& layout, std::uint64_t seed) {
  SimulationJob job;
  job.window = demand.events.empty() ? TimeWindow{} : TimeWindow{demand.events.front().timestamp,
                                                                 demand.events.back().timestamp};
  job.strategy = StrategySpec{"random_feasible", nlohmann::json::object()};
  job.seed = seed;
  EventLog log = counterfactual_run(demand, layout, job).events;
  for (YardEvent& e : log.events) e.synthetic = false;
  return log;
}

}  // namespace yardtwin::workload
