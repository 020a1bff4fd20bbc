// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "yardtwin/service.hpp"
#include "yardtwin/workload.hpp"
#include "yardtwin/yardtwin.hpp"

#ifndef YARDTWIN_TEST_DATA
#error "YARDTWIN_TEST_DATA must point at tests/data"
#endif
#ifndef YARDTWIN_CLI
#error "YARDTWIN_CLI must name the yardtwin executable"
#endif

using namespace yardtwin;
using rehandle::Rational;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string data_path(const std::string& name) { return std::string(YARDTWIN_TEST_DATA) + "/" + name; }

YardLayout golden_layout() {
  std::ifstream in(data_path("golden_layout.json"));
  return layout_from_json(nlohmann::json::parse(in));
}

EventLog golden_log() {
  std::ifstream in(data_path("golden_12.jsonl"));
  return parse_log(in);
}

const std::vector<std::pair<int, int>> kGrid{{2, 2}, {2, 3}, {3, 2}, {3, 3}};

Verdict oracle_grid() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0;
  for (auto [rows, tiers] : kGrid) {
    for (int k = 1; k <= rows * tiers; ++k) {
      const double exact = rehandle::to_double(rehandle::expected_rehandles(k, rows, tiers));
      const auto mc = rehandle::monte_carlo_oracle(k, rows, tiers, rehandle::PlacementModel::UniformNonFull,
                                                   rehandle::RelocationPolicy::LowestOther, 200000,
                                                   derive_seed(20240301, static_cast<std::uint64_t>(100 * rows + 10 * tiers + k)));
      const double gap = std::abs(exact - mc.mean);
      const double tol = std::max(0.01, 4 * mc.standard_error);
      worst = std::max(worst, gap / tol);
      v.require(gap <= tol, "R=" + std::to_string(rows) + " T=" + std::to_string(tiers) + " k=" + std::to_string(k) +
                                " exact " + std::to_string(exact) + " mc " + std::to_string(mc.mean));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(secs < 60.0, "grid took " + std::to_string(secs) + " s");
  if (v.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "largest gap/tolerance %.3f, %.1f s", worst, secs);
    v.detail = buf;
  }
  return v;
}

Verdict hand_value() {
  Verdict v;
  // Two rows of two tiers. The second box joins the first's row with
  // probability 1/2; then half the picks take the buried one at cost 1.
  Rational enumerated(0);
  for (int second_row : {0, 1}) {
    std::vector<int> h{1, 0};
    ++h[static_cast<std::size_t>(second_row)];
    Rational cost(0);
    for (int x : h) {
      for (int tier = 1; tier <= x; ++tier) cost += x - tier;
    }
    enumerated += Rational(1, 2) * cost / 2;
  }
  const Rational got = rehandle::expected_rehandles(2, 2, 2);
  v.require(enumerated == Rational(1, 4), "enumeration gave " + enumerated.str());
  v.require(got == enumerated, "library gave " + got.str());
  if (v.ok) v.detail = "v_2 = " + got.str();
  return v;
}

Verdict trivial_analytics() {
  Verdict v;
  for (int rows = 1; rows <= 4; ++rows) {
    for (int tiers = 1; tiers <= 4; ++tiers) {
      v.require(rehandle::expected_rehandles(1, rows, tiers) == 0,
                "v_1 nonzero at R=" + std::to_string(rows) + " T=" + std::to_string(tiers));
    }
    for (int k = 1; k <= rows; ++k) {
      v.require(rehandle::expected_rehandles(k, rows, 1) == 0,
                "T=1 nonzero at R=" + std::to_string(rows) + " k=" + std::to_string(k));
    }
  }
  if (v.ok) v.detail = "R,T in 1..4";
  return v;
}

Verdict normalization() {
  Verdict v;
  double worst = 0;
  std::size_t kernels = 0;
  for (auto [rows, tiers] : kGrid) {
    for (int k = 1; k <= rows * tiers; ++k) {
      Rational total(0);
      for (const auto& [config, p] : rehandle::fill_distribution(k, rows, tiers).entries) {
        total += p;
        Rational kernel(0);
        for (const auto& t : rehandle::pick_transitions(config)) kernel += t.probability;
        worst = std::max(worst, std::abs(rehandle::to_double(kernel) - 1.0));
        ++kernels;
      }
      worst = std::max(worst, std::abs(rehandle::to_double(total) - 1.0));
    }
  }
  v.require(worst <= 1e-12, "deviation " + std::to_string(worst));
  if (v.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu kernels, max deviation %.1e", kernels, worst);
    v.detail = buf;
  }
  return v;
}

// Gravity, slot/container bijection and count conservation, checked from the
// container records and stack contents rather than the state's own checks.
std::string invariant_breach(const YardState& state, const YardLayout& layout, std::int64_t expected_in_yard) {
  std::set<std::string> on_slots;
  std::int64_t occupied = 0;
  for (const BlockSpec& b : layout.blocks()) {
    for (int bay = 1; bay <= b.bay_count; ++bay) {
      for (int row = 1; row <= b.row_count; ++row) {
        const auto& stack = state.stack({b.block_id, bay, row});
        if (static_cast<int>(stack.size()) > b.max_tier) return "stack above max tier";
        for (std::size_t i = 0; i < stack.size(); ++i) {
          ++occupied;
          if (!on_slots.insert(stack[i]).second) return stack[i] + " on two slots";
          const ContainerRecord* rec = state.find(stack[i]);
          if (rec == nullptr || !rec->current_slot) return stack[i] + " on a slot without a record";
          if (!(*rec->current_slot == SlotAddress{b.block_id, bay, row, static_cast<int>(i) + 1})) {
            return stack[i] + " record disagrees with its slot";
          }
        }
      }
    }
  }
  std::int64_t with_slot = 0;
  for (const auto& [id, rec] : state.containers()) {
    if (!rec.current_slot) continue;
    ++with_slot;
    const SlotAddress& s = *rec.current_slot;
    if (s.tier > 1 && !state.at({s.block_id, s.bay, s.row, s.tier - 1})) return id + " floating";
    if (!on_slots.contains(id)) return id + " has a slot but is not stacked";
  }
  if (with_slot != occupied) return "record and slot counts differ";
  if (occupied != expected_in_yard) return "count not conserved";
  return {};
}

Verdict twin_invariants() {
  Verdict v;
  const YardLayout layout = workload::study_layout();
  EventLog log = workload::realize(workload::rolling(layout, 4000, 17), layout, 17);
  if (log.events.size() < 10000) {
    v.require(false, "workload produced only " + std::to_string(log.events.size()) + " events");
    return v;
  }
  log.events.resize(10000);

  YardState state(layout);
  std::int64_t in_yard = 0;
  std::size_t checked = 0;
  for (const YardEvent& e : log.events) {
    try {
      detail::apply_or_halt(state, e);
    } catch (const YardError& err) {
      v.require(false, std::string("clean log halted: ") + err.what());
      return v;
    }
    if (is_arrival(e.kind)) ++in_yard;
    if (is_departure(e.kind)) --in_yard;
    const std::string breach = invariant_breach(state, layout, in_yard);
    v.require(breach.empty(), "after seq " + std::to_string(e.seq) + ": " + breach);
    if (!v.ok) return v;
    ++checked;
  }

  // Inject one floating placement midway, over a stack that is empty then.
  const std::size_t at = 5000;
  const YardState mid = replay_to(log, layout, log.events[at].timestamp);
  std::optional<StackId> empty;
  for (const BlockSpec& b : layout.blocks()) {
    for (int bay = 1; bay <= b.bay_count && !empty; ++bay) {
      for (int row = 1; row <= b.row_count && !empty; ++row) {
        if (mid.height({b.block_id, bay, row}) == 0) empty = StackId{b.block_id, bay, row};
      }
    }
  }
  v.require(empty.has_value(), "no empty stack to inject over");
  if (!v.ok) return v;
  // Its seq sorts after every event at that instant, so the stack is still empty.
  YardEvent bad;
  bad.seq = 1000000;
  bad.timestamp = log.events[at].timestamp;
  bad.kind = EventKind::GateIn;
  bad.container_id = "ZZZU9999999";
  bad.to_slot = SlotAddress{empty->block_id, empty->bay, empty->row, 2};
  bad.attrs = {{"iso_type", "22G1"}};
  EventLog injected = log;
  injected.events.push_back(bad);
  sort_log(injected);
  try {
    replay(injected, layout, {log.events.front().timestamp, log.events.back().timestamp});
    v.require(false, "floating placement was accepted");
  } catch (const YardError& err) {
    v.require(err.code() == ErrorCode::ReplayHalted, "wrong code");
    v.require(err.seq() == bad.seq, "halted at the wrong seq");
    v.require(err.cause() == ErrorCode::FloatingPlacement, "wrong cause");
  }
  if (v.ok) v.detail = std::to_string(checked) + " events checked, injection halted at seq " + std::to_string(bad.seq);
  return v;
}

std::string replay_bytes(const EventLog& log, const YardLayout& layout, const TimeWindow& w, Step step) {
  std::string out;
  for (const Frame& f : replay(log, layout, w, step)) out += snapshot_to_json(f.state).dump() + "\n";
  return out;
}

Verdict determinism() {
  Verdict v;
  const YardLayout layout = workload::study_layout();
  const EventLog log = workload::realize(workload::grouped_departures(layout, 200, 4, 5), layout, 5);
  const TimeWindow window{log.events.front().timestamp, log.events.back().timestamp};
  for (const char* name : {"random_feasible", "category_segregation", "lowest_tier", "nearest_slot"}) {
    SimulationJob job;
    job.window = window;
    job.strategy = {name, std::string(name) == "category_segregation"
                              ? nlohmann::json{{"key", "destination_port"}}
                              : nlohmann::json::object()};
    job.seed = 99;
    auto once = [&] {
      const SimulatedLog sim = counterfactual_run(log, layout, job);
      return std::array<std::string, 3>{serialize_log(sim.events), to_json(compare_runs(log, sim, layout, window)).dump(),
                                        replay_bytes(with_warm_start(log, sim), layout, window, Step::Hour)};
    };
    const auto a = once();
    const auto b = once();
    v.require(a[0] == b[0], std::string(name) + ": simulated log differs");
    v.require(a[1] == b[1], std::string(name) + ": KPI comparison differs");
    v.require(a[2] == b[2], std::string(name) + ": snapshots differ");
  }
  v.require(replay_bytes(log, layout, window, Step::Event) == replay_bytes(log, layout, window, Step::Event),
            "event replay differs");
  v.require(to_json(kpi_report(log, layout, window)).dump() == to_json(kpi_report(log, layout, window)).dump(),
            "KPI report differs");
  if (v.ok) v.detail = "four strategies, seed 99";
  return v;
}

Verdict kpi_golden() {
  Verdict v;
  // Hand counts taken straight from the raw lines.
  std::ifstream in(data_path("golden_12.jsonl"));
  std::string line;
  std::map<std::string, int> shifts;
  int moves = 0, shift_lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const std::string kind = j.at("kind");
    if (kind == "CRANE_POS") continue;
    ++moves;
    const std::string id = j.at("container");
    shifts.try_emplace(id, 0);
    if (kind == "YARD_SHIFT") {
      ++shifts[id];
      ++shift_lines;
    }
  }
  std::vector<std::int64_t> histogram;
  for (const auto& [id, n] : shifts) {
    if (histogram.size() <= static_cast<std::size_t>(n)) histogram.resize(static_cast<std::size_t>(n) + 1, 0);
    ++histogram[static_cast<std::size_t>(n)];
  }

  const EventLog log = golden_log();
  const KpiReport r =
      kpi_report(log, golden_layout(), {log.events.front().timestamp, log.events.back().timestamp});
  v.require(shift_lines == 3, "fixture does not hold three shifts");
  v.require(r.unproductive_moves == 3, "unproductive_moves " + std::to_string(r.unproductive_moves));
  v.require(r.total_moves == moves, "total_moves " + std::to_string(r.total_moves));
  v.require(r.unproductive_ratio == 3.0 / moves, "unproductive_ratio");
  v.require(r.rehandles_per_container.histogram == histogram, "rehandle histogram");
  v.require(r.rehandles_per_container.containers == static_cast<std::int64_t>(shifts.size()), "container count");
  if (v.ok) v.detail = "3/" + std::to_string(moves) + " unproductive";
  return v;
}

Verdict crane_travel_fixture() {
  Verdict v;
  const YardLayout layout({{"A", 10, 3, 4, 6.5, 2.9}});
  auto ping = [](const char* slot) {
    YardEvent e;
    e.kind = EventKind::CranePos;
    e.to_slot = parse_slot(slot);
    e.equipment_id = "RTG-01";
    return e;
  };
  const std::vector<YardEvent> there{ping("A.05.3.1"), ping("A.08.1.1")};
  const std::vector<YardEvent> back{ping("A.05.3.1"), ping("A.08.1.1"), ping("A.05.3.1")};
  const double one = crane_travel(there, layout);
  const double two = crane_travel(back, layout);
  const double hand = 3 * 6.5 + 2 * 2.9;
  v.require(std::abs(one - 25.3) < 1e-9 && std::abs(one - hand) < 1e-9, "one way " + std::to_string(one));
  v.require(std::abs(two - 2 * one) < 1e-9, "out and back " + std::to_string(two));
  if (v.ok) v.detail = "25.3 m, out and back 50.6 m";
  return v;
}

Verdict strategy_separation() {
  Verdict v;
  const YardLayout layout = workload::study_layout();
  int wins = 0, losses = 0;
  double seg_sum = 0, rnd_sum = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const EventLog log = workload::realize(workload::grouped_departures(layout, 200, 4, seed), layout, seed);
    const TimeWindow window{log.events.front().timestamp, log.events.back().timestamp};
    auto unproductive = [&](const char* name, nlohmann::json params) {
      SimulationJob job;
      job.window = window;
      job.strategy = {name, std::move(params)};
      job.seed = seed;
      return run_job(log, layout, job).simulated.unproductive_moves;
    };
    const auto seg = unproductive("category_segregation", {{"key", "destination_port"}});
    const auto rnd = unproductive("random_feasible", nlohmann::json::object());
    seg_sum += static_cast<double>(seg);
    rnd_sum += static_cast<double>(rnd);
    wins += seg < rnd;
    losses += seg > rnd;
  }
  // One-sided sign test, ties dropped.
  const int n = wins + losses;
  double p = 0;
  for (int i = wins; i <= n; ++i) p += std::exp(std::lgamma(n + 1) - std::lgamma(i + 1) - std::lgamma(n - i + 1) - n * std::log(2.0));
  char buf[160];
  std::snprintf(buf, sizeof buf, "segregation %.2f vs random %.2f mean unproductive, %d wins %d losses, p = %.4f",
                seg_sum / 20, rnd_sum / 20, wins, losses, p);
  v.require(seg_sum < rnd_sum && p < 0.05, buf);
  if (v.ok) v.detail = buf;
  return v;
}

std::string run_cli(const std::string& args) {
  const auto out = std::filesystem::temp_directory_path() / ("yardtwin_acceptance_" + std::to_string(::getpid()));
  const std::string cmd = std::string("'") + YARDTWIN_CLI + "' " + args + " >'" + out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  std::filesystem::remove(out);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "<exit " + std::to_string(status) + ">";
  return s.str();
}

Verdict api_consistency() {
  Verdict v;
  const service::Service svc(golden_layout(), golden_log(), 1);
  const std::string files = "--layout '" + data_path("golden_layout.json") + "' --log '" + data_path("golden_12.jsonl") + "'";
  int compared = 0;
  for (const char* at : {"2024-03-01T07:59:59Z", "2024-03-01T08:00:00Z", "2024-03-01T09:07:30Z",
                         "2024-03-01T10:30:00Z", "2024-03-01T12:00:00Z"}) {
    const auto api = svc.handle(service::Request{"GET", "/yard/snapshot", {{"at", at}}, {}});
    v.require(api.status == 200, std::string("API status at ") + at);
    v.require(run_cli("replay " + files + " --at " + at) == api.body + "\n", std::string("bytes differ at ") + at);
    ++compared;
  }
  if (v.ok) v.detail = std::to_string(compared) + " instants byte-identical, no console build involved";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"exact expected rehandles agree with Monte Carlo on the 2..3 x 2..3 grid", oracle_grid},
      {"R=2 T=2 k=2 gives exactly 1/4", hand_value},
      {"single container and single tier give zero", trivial_analytics},
      {"fill distributions and pick kernels sum to one", normalization},
      {"replay keeps gravity, bijection and counts; floating placement halts", twin_invariants},
      {"replay, counterfactual and KPI bytes repeat", determinism},
      {"golden 12-event KPI report", kpi_golden},
      {"crane travel fixture", crane_travel_fixture},
      {"category segregation beats random feasible", strategy_separation},
      {"API snapshot equals CLI replay", api_consistency},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = Verdict{false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    failed += !v.ok;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
