// yardtwin: batch driver for validation, replay, KPIs, strategy simulation
// and the bay rehandle analytics.
//
// Exit codes: 0 ok, 1 domain violations or domain errors, 2 usage errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "yardtwin/yardtwin.hpp"

namespace {

using namespace yardtwin;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;

struct WindowFlags {
  std::string from;
  std::string to;
};

// Missing bounds default to the first and last event of the log.
TimeWindow resolve_window(const WindowFlags& flags, const EventLog& log) {
  Timestamp first{}, last{};
  if (!log.events.empty()) {
    first = log.events.front().timestamp;
    last = log.events.back().timestamp;
  }
  try {
    const Timestamp from = flags.from.empty() ? first : parse_timestamp(flags.from);
    const Timestamp to = flags.to.empty() ? last : parse_timestamp(flags.to);
    return make_window(from, to);
  } catch (const YardError& e) {
    throw cli::UsageError(e.what());
  }
}

TravelOptions travel_options(const std::string& metric, double inter_block_m) {
  TravelOptions opts;
  opts.metric = metric == "chebyshev" ? TravelMetric::Chebyshev : TravelMetric::Rectilinear;
  opts.inter_block_m = inter_block_m;
  return opts;
}

StrategySpec parse_strategy(const std::string& text, const std::string& params) {
  try {
    if (!text.empty() && text.front() == '{') return strategy_spec_from_json(nlohmann::json::parse(text));
    return StrategySpec{text, params.empty() ? nlohmann::json::object() : nlohmann::json::parse(params)};
  } catch (const nlohmann::json::exception& e) {
    throw cli::UsageError(std::string("strategy is not valid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Container yard digital twin"};
  app.require_subcommand(1);

  std::string layout_path, log_path, format = "json", metric = "rectilinear";
  double inter_block_m = 0.0;
  WindowFlags window_flags;

  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--layout", layout_path, "Layout JSON file")->required();
    cmd->add_option("--log", log_path, "Event log (JSONL)")->required();
  };
  auto add_window = [&](CLI::App* cmd) {
    cmd->add_option("--from", window_flags.from, "Window start (YYYY-MM-DDTHH:MM:SSZ)");
    cmd->add_option("--to", window_flags.to, "Window end (YYYY-MM-DDTHH:MM:SSZ)");
  };
  auto add_travel = [&](CLI::App* cmd) {
    cmd->add_option("--metric", metric, "Crane distance metric")->check(CLI::IsMember({"rectilinear", "chebyshev"}));
    cmd->add_option("--inter-block-m", inter_block_m, "Travel charged per block change")->check(CLI::NonNegativeNumber);
  };

  auto* validate = app.add_subcommand("validate", "Check a log against a layout");
  add_inputs(validate);

  auto* kpi = app.add_subcommand("kpi", "KPI report over a window");
  add_inputs(kpi);
  add_window(kpi);
  add_travel(kpi);
  kpi->add_option("--format", format, "json or csv (rehandle histogram)")->check(CLI::IsMember({"json", "csv"}));

  std::string at, step = "EVENT";
  auto* replay_cmd = app.add_subcommand("replay", "Mirror replay: snapshot at a time, or frames over a window");
  add_inputs(replay_cmd);
  add_window(replay_cmd);
  replay_cmd->add_option("--at", at, "Single snapshot at this time");
  replay_cmd->add_option("--step", step, "EVENT, HOUR or DAY")->check(CLI::IsMember({"EVENT", "HOUR", "DAY"}));

  std::string strategy_text, params_text, emit_log;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Counterfactual run compared against the logged window");
  add_inputs(simulate);
  add_window(simulate);
  add_travel(simulate);
  simulate->add_option("--strategy", strategy_text, "Strategy name or StrategySpec JSON")->required();
  simulate->add_option("--params", params_text, "Strategy params JSON when --strategy is a name");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--step", step, "EVENT, HOUR or DAY")->check(CLI::IsMember({"EVENT", "HOUR", "DAY"}));
  simulate->add_option("--emit-log", emit_log, "Also write the simulated log (JSONL) here");

  int rows = 0, tiers = 0, kmax = 0;
  std::int64_t trials = 200000;
  std::string placement = "uniform", relocation = "lowest";
  auto* rehandles = app.add_subcommand("rehandles", "Expected rehandles per pick, analytic and Monte Carlo");
  rehandles->add_option("--rows", rows)->required()->check(CLI::PositiveNumber);
  rehandles->add_option("--tiers", tiers)->required()->check(CLI::PositiveNumber);
  rehandles->add_option("--kmax", kmax)->required()->check(CLI::PositiveNumber);
  rehandles->add_option("--trials", trials)->check(CLI::PositiveNumber);
  rehandles->add_option("--seed", seed);
  rehandles->add_option("--placement", placement)->check(CLI::IsMember({"uniform", "lowest"}));
  rehandles->add_option("--relocation", relocation)->check(CLI::IsMember({"lowest", "uniform"}));
  rehandles->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  std::string kind = "grouped", out_layout, out_log;
  std::size_t containers = 200;
  int groups = 4;
  auto* generate = app.add_subcommand("generate", "Write a synthetic three-block layout and a replayable log");
  generate->add_option("--kind", kind)->check(CLI::IsMember({"grouped", "rolling"}));
  generate->add_option("--containers", containers)->check(CLI::PositiveNumber);
  generate->add_option("--groups", groups)->check(CLI::PositiveNumber);
  generate->add_option("--seed", seed);
  generate->add_option("--out-layout", out_layout)->required();
  generate->add_option("--out-log", out_log)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (rehandles->parsed() && kmax > rows * tiers) {
    std::cerr << "--kmax exceeds rows*tiers\n";
    return kUsage;
  }

  try {
    if (rehandles->parsed()) {
      const auto rows_out = rehandle::rehandle_report(
          rows, tiers, kmax, trials, seed,
          placement == "lowest" ? rehandle::PlacementModel::LowestStack : rehandle::PlacementModel::UniformNonFull,
          relocation == "uniform" ? rehandle::RelocationPolicy::UniformOther : rehandle::RelocationPolicy::LowestOther);
      if (format == "json" && rehandles->count("--format") > 0) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : rows_out) {
          out.push_back({{"R", r.rows}, {"T", r.tiers}, {"k", r.k}, {"v_k", rehandle::to_double(r.v_k)},
                         {"v_k_exact", r.v_k.str()}, {"v_to_empty", rehandle::to_double(r.v_to_empty)},
                         {"mc_mean", r.mc.mean}, {"mc_se", r.mc.standard_error}, {"trials", r.mc.trials},
                         {"seed", r.seed}});
        }
        std::cout << out.dump() << '\n';
      } else {
        std::cout << rehandle::report_csv(rows_out);
      }
      return kOk;
    }

    if (generate->parsed()) {
      const YardLayout layout = workload::study_layout();
      const EventLog demand = kind == "grouped" ? workload::grouped_departures(layout, containers, groups, seed)
                                                : workload::rolling(layout, containers, seed);
      std::ofstream lo(out_layout), ev(out_log);
      if (!lo || !ev) throw cli::UsageError("cannot write outputs");
      lo << nlohmann::json(layout).dump(2) << '\n';
      write_log(ev, workload::realize(demand, layout, seed));
      return kOk;
    }

    const YardLayout layout = cli::load_layout(layout_path);
    const EventLog log = cli::load_log(log_path);

    if (validate->parsed()) {
      const auto violations = validate_against(log, layout);
      for (const auto& v : violations) std::cerr << v.label() << ": " << v.detail << '\n';
      return violations.empty() ? kOk : kViolations;
    }

    if (kpi->parsed()) {
      const KpiReport report = kpi_report(log, layout, resolve_window(window_flags, log),
                                          travel_options(metric, inter_block_m));
      if (format == "csv") {
        std::cout << histogram_csv(report);
      } else {
        std::cout << to_json(report).dump() << '\n';
      }
      return kOk;
    }

    if (replay_cmd->parsed()) {
      if (!at.empty()) {
        Timestamp t;
        try {
          t = parse_timestamp(at);
        } catch (const YardError& e) {
          throw cli::UsageError(e.what());
        }
        std::cout << snapshot_to_json(replay_to(log, layout, t)).dump() << '\n';
        return kOk;
      }
      for (const Frame& f : replay(log, layout, resolve_window(window_flags, log), step_from_name(step))) {
        std::cout << nlohmann::json{{"boundary", format_timestamp(f.boundary)}, {"snapshot", snapshot_to_json(f.state)}}
                         .dump()
                  << '\n';
      }
      return kOk;
    }

    if (simulate->parsed()) {
      SimulationJob job;
      job.job_id = "cli";
      job.window = resolve_window(window_flags, log);
      job.step = step_from_name(step);
      job.strategy = parse_strategy(strategy_text, params_text);
      job.seed = seed;
      const SimulatedLog sim = counterfactual_run(log, layout, job);
      if (!emit_log.empty()) {
        std::ofstream out(emit_log);
        if (!out) throw cli::UsageError("cannot write " + emit_log);
        write_log(out, sim.events);
      }
      const KpiComparison cmp = compare_runs(log, sim, layout, job.window, travel_options(metric, inter_block_m));
      std::cout << to_json(cmp).dump() << '\n';
      return kOk;
    }
  } catch (const cli::UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const YardError& e) {
    std::cerr << e.what() << '\n';
    return kViolations;
  }
  return kUsage;
}
