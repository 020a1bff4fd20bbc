#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "yardtwin/distance.hpp"
#include "yardtwin/engine.hpp"
#include "yardtwin/events.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/time.hpp"
#include "yardtwin/yard_state.hpp"

namespace yardtwin {

enum class MoveClass { Productive, Unproductive, NonMove };

constexpr MoveClass classify_move(const YardEvent& e) {
  switch (e.kind) {
    case EventKind::YardShift: return MoveClass::Unproductive;
    case EventKind::CranePos: return MoveClass::NonMove;
    default: return MoveClass::Productive;
  }
}

/// Positions visited by the equipment that produced `e`, in order.
inline std::vector<StackId> crane_positions(const YardEvent& e) {
  std::vector<StackId> out;
  if (e.kind == EventKind::CranePos || is_arrival(e.kind)) {
    out.push_back(e.to_slot->stack());
  } else if (is_departure(e.kind)) {
    out.push_back(e.from_slot->stack());
  } else {
    out.push_back(e.from_slot->stack());
    out.push_back(e.to_slot->stack());
  }
  return out;
}

/// Meters travelled by one crane over its time-ordered events.
inline double crane_travel(const std::vector<YardEvent>& events, const YardLayout& layout,
                           const TravelOptions& opts = {}) {
  double meters = 0.0;
  std::optional<StackId> at;
  for (const YardEvent& e : events) {
    for (const StackId& next : crane_positions(e)) {
      if (at) {
        meters += travel_distance(layout, *at, next, opts);
      } else if (layout.find(next.block_id) == nullptr) {
        fail(ErrorCode::UnknownEquipmentLayout, "position in unknown block " + next.block_id);
      }
      at = next;
    }
  }
  return meters;
}

inline double round_to(double value, double quantum) { return std::round(value / quantum) * quantum; }

struct RehandleSummary {
  std::int64_t containers = 0;
  double mean = 0.0;
  int max = 0;
  // histogram[n] = containers rehandled exactly n times in the window.
  std::vector<std::int64_t> histogram;
};

struct KpiReport {
  TimeWindow window;
  std::int64_t total_moves = 0;
  std::int64_t productive_moves = 0;
  std::int64_t unproductive_moves = 0;
  double unproductive_ratio = 0.0;
  RehandleSummary rehandles_per_container;
  // Containers that left during the window.
  std::int64_t departed_containers = 0;
  double mean_dwell_days = 0.0;
  // Containers still in the yard at window.to, measured up to window.to.
  std::int64_t open_containers = 0;
  double mean_current_dwell_days = 0.0;
  std::map<std::string, double> crane_travel_m;
  double crane_travel_total_m = 0.0;
  std::map<std::string, std::int64_t> occupancy_peak;
};

/// Aggregates the window: move classes, per-container rehandles, dwell, crane
/// travel and peak block occupancy. The yard is warm-started from events
/// before the window; the rehandle population is every container in the yard
/// at some point during the window.
inline KpiReport kpi_report(const EventLog& log, const YardLayout& layout, const TimeWindow& window,
                            const TravelOptions& travel = {}) {
  KpiReport r;
  r.window = window;
  YardState state(layout);
  std::size_t next = 0;
  while (next < log.events.size() && log.events[next].timestamp < window.from) {
    detail::apply_or_halt(state, log.events[next++]);
  }

  std::map<std::string, int> shifts;
  for (const auto& [id, rec] : state.containers()) {
    if (rec.current_slot) shifts[id] = 0;
  }
  auto track_peaks = [&] {
    for (const BlockSpec& b : layout.blocks()) {
      auto& peak = r.occupancy_peak[b.block_id];
      peak = std::max<std::int64_t>(peak, state.block_count(b.block_id));
    }
  };
  track_peaks();

  std::map<std::string, std::vector<YardEvent>> by_equipment;
  double dwell_sum = 0.0;
  for (; next < log.events.size() && window.contains(log.events[next].timestamp); ++next) {
    const YardEvent& e = log.events[next];
    if (is_departure(e.kind) && state.in_yard(*e.container_id)) {
      dwell_sum += static_cast<double>(e.timestamp.seconds - state.container(*e.container_id).arrival_time.seconds);
      ++r.departed_containers;
    }
    detail::apply_or_halt(state, e);
    switch (classify_move(e)) {
      case MoveClass::Productive: ++r.productive_moves; break;
      case MoveClass::Unproductive: ++r.unproductive_moves; break;
      case MoveClass::NonMove: break;
    }
    if (is_arrival(e.kind)) shifts.try_emplace(*e.container_id, 0);
    if (e.kind == EventKind::YardShift) ++shifts[*e.container_id];
    if (e.equipment_id) by_equipment[*e.equipment_id].push_back(e);
    track_peaks();
  }

  r.total_moves = r.productive_moves + r.unproductive_moves;
  r.unproductive_ratio = r.total_moves == 0 ? 0.0
                                            : static_cast<double>(r.unproductive_moves) /
                                                  static_cast<double>(r.total_moves);
  auto& rh = r.rehandles_per_container;
  rh.containers = static_cast<std::int64_t>(shifts.size());
  std::int64_t shift_total = 0;
  for (const auto& [id, n] : shifts) {
    rh.max = std::max(rh.max, n);
    shift_total += n;
    if (rh.histogram.size() <= static_cast<std::size_t>(n)) rh.histogram.resize(static_cast<std::size_t>(n) + 1, 0);
    ++rh.histogram[static_cast<std::size_t>(n)];
  }
  rh.mean = rh.containers == 0 ? 0.0 : static_cast<double>(shift_total) / static_cast<double>(rh.containers);

  if (r.departed_containers > 0) {
    r.mean_dwell_days = round_to(dwell_sum / static_cast<double>(r.departed_containers) / kSecondsPerDay, 0.1);
  }
  double open_sum = 0.0;
  for (const auto& [id, rec] : state.containers()) {
    if (!rec.current_slot) continue;
    ++r.open_containers;
    open_sum += static_cast<double>(window.to.seconds - rec.arrival_time.seconds);
  }
  if (r.open_containers > 0) {
    r.mean_current_dwell_days = round_to(open_sum / static_cast<double>(r.open_containers) / kSecondsPerDay, 0.1);
  }

  for (const auto& [equipment, events] : by_equipment) {
    const double meters = crane_travel(events, layout, travel);
    r.crane_travel_m[equipment] = round_to(meters, 0.001);
    r.crane_travel_total_m += meters;
  }
  r.crane_travel_total_m = round_to(r.crane_travel_total_m, 0.001);
  return r;
}

inline nlohmann::json window_to_json(const TimeWindow& w) {
  return nlohmann::json{{"from", format_timestamp(w.from)}, {"to", format_timestamp(w.to)}};
}

inline nlohmann::json to_json(const KpiReport& r) {
  using nlohmann::json;
  json travel = json::object();
  for (const auto& [k, v] : r.crane_travel_m) travel[k] = v;
  json peaks = json::object();
  for (const auto& [k, v] : r.occupancy_peak) peaks[k] = v;
  return json{
      {"window", window_to_json(r.window)},
      {"total_moves", r.total_moves},
      {"productive_moves", r.productive_moves},
      {"unproductive_moves", r.unproductive_moves},
      {"unproductive_ratio", r.unproductive_ratio},
      {"rehandles_per_container",
       {{"containers", r.rehandles_per_container.containers},
        {"mean", r.rehandles_per_container.mean},
        {"max", r.rehandles_per_container.max},
        {"histogram", r.rehandles_per_container.histogram}}},
      {"departed_containers", r.departed_containers},
      {"mean_dwell_days", r.mean_dwell_days},
      {"open_containers", r.open_containers},
      {"mean_current_dwell_days", r.mean_current_dwell_days},
      {"crane_travel_m", {{"per_equipment", travel}, {"total", r.crane_travel_total_m}}},
      {"occupancy_peak", peaks},
  };
}

/// rehandles,containers rows for the rehandle histogram.
inline std::string histogram_csv(const KpiReport& r) {
  std::ostringstream out;
  out << "rehandles,containers\n";
  const auto& h = r.rehandles_per_container.histogram;
  for (std::size_t i = 0; i < h.size(); ++i) out << i << ',' << h[i] << '\n';
  return out.str();
}

struct KpiComparison {
  KpiReport real;
  KpiReport simulated;
  // simulated minus real, keyed by metric name.
  std::map<std::string, double> deltas;
};

inline std::map<std::string, double> kpi_deltas(const KpiReport& real, const KpiReport& sim) {
  auto d = [](double s, double r) { return s - r; };
  return {
      {"total_moves", d(sim.total_moves, real.total_moves)},
      {"productive_moves", d(sim.productive_moves, real.productive_moves)},
      {"unproductive_moves", d(sim.unproductive_moves, real.unproductive_moves)},
      {"unproductive_ratio", d(sim.unproductive_ratio, real.unproductive_ratio)},
      {"rehandles_mean", d(sim.rehandles_per_container.mean, real.rehandles_per_container.mean)},
      {"rehandles_max", d(sim.rehandles_per_container.max, real.rehandles_per_container.max)},
      {"mean_dwell_days", d(sim.mean_dwell_days, real.mean_dwell_days)},
      {"mean_current_dwell_days", d(sim.mean_current_dwell_days, real.mean_current_dwell_days)},
      {"crane_travel_total_m", d(sim.crane_travel_total_m, real.crane_travel_total_m)},
  };
}

inline KpiComparison compare_reports(KpiReport real, KpiReport simulated) {
  if (!(real.window == simulated.window)) fail(ErrorCode::WindowMismatch, "reports cover different windows");
  KpiComparison c{std::move(real), std::move(simulated), {}};
  c.deltas = kpi_deltas(c.real, c.simulated);
  return c;
}

/// KPIs of the logged window next to those of a counterfactual run over the
/// same window. The simulated side is warm-started from the real prefix.
inline KpiComparison compare_runs(const EventLog& real, const SimulatedLog& simulated, const YardLayout& layout,
                                  const TimeWindow& window, const TravelOptions& travel = {}) {
  if (!(simulated.window == window)) {
    fail(ErrorCode::WindowMismatch, "simulated run covers " + format_timestamp(simulated.window.from) + ".." +
                                        format_timestamp(simulated.window.to));
  }
  return compare_reports(kpi_report(real, layout, window, travel),
                         kpi_report(with_warm_start(real, simulated), layout, window, travel));
}

inline nlohmann::json to_json(const KpiComparison& c) {
  nlohmann::json deltas = nlohmann::json::object();
  for (const auto& [k, v] : c.deltas) deltas[k] = v;
  return nlohmann::json{{"real", to_json(c.real)}, {"simulated", to_json(c.simulated)}, {"deltas", deltas}};
}

/// Runs a job end to end: counterfactual simulation then comparison.
inline KpiComparison run_job(const EventLog& log, const YardLayout& layout, const SimulationJob& job,
                             const TravelOptions& travel = {}) {
  return compare_runs(log, counterfactual_run(log, layout, job), layout, job.window, travel);
}

}  // namespace yardtwin
