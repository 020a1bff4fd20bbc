#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "yardtwin/distance.hpp"
#include "yardtwin/error.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/rng.hpp"
#include "yardtwin/yard_state.hpp"

namespace yardtwin {

/// Wire form: {"name": "...", "params": {...}}.
struct StrategySpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();

  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

inline StrategySpec strategy_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string()) {
    fail(ErrorCode::InvalidStrategy, "strategy must be an object with a string 'name'");
  }
  StrategySpec spec{j.at("name").get<std::string>(), nlohmann::json::object()};
  if (auto it = j.find("params"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) fail(ErrorCode::InvalidStrategy, "'params' must be an object");
    spec.params = *it;
  }
  return spec;
}

inline nlohmann::json to_json(const StrategySpec& spec) {
  return nlohmann::json{{"name", spec.name}, {"params", spec.params}};
}

enum class StrategyKind { Identity, RandomFeasible, LowestTier, CategorySegregation, NearestSlot };
enum class RelocationScope { Block, Yard };
enum class SegregationKey { DestinationPort, DepartureWindow };

/// Extra facts a placement may use besides the snapshot.
struct PlacementContext {
  // Keep the container in this block when it has room.
  std::optional<std::string> preferred_block;
  // Last known position of the crane doing the move.
  std::optional<SlotAddress> crane_position;
};

/// A validated StrategySpec. All policies are stateless: outputs depend only
/// on (snapshot, container, rng state, params). "identity" is the logged-slot
/// replay used as the do-nothing baseline; it never chooses slots itself.
class Strategy {
 public:
  static Strategy from_spec(const StrategySpec& spec) {
    Strategy s;
    s.spec_ = spec;
    if (spec.name == "identity") s.kind_ = StrategyKind::Identity;
    else if (spec.name == "random_feasible") s.kind_ = StrategyKind::RandomFeasible;
    else if (spec.name == "lowest_tier") s.kind_ = StrategyKind::LowestTier;
    else if (spec.name == "category_segregation") s.kind_ = StrategyKind::CategorySegregation;
    else if (spec.name == "nearest_slot") s.kind_ = StrategyKind::NearestSlot;
    else fail(ErrorCode::InvalidStrategy, "unknown strategy '" + spec.name + "'");

    if (!spec.params.is_object()) fail(ErrorCode::InvalidStrategy, "'params' must be an object");
    for (auto it = spec.params.begin(); it != spec.params.end(); ++it) {
      const std::string& key = it.key();
      const auto& value = it.value();
      if (key == "relocation_scope") {
        if (value == "block") s.scope_ = RelocationScope::Block;
        else if (value == "yard") s.scope_ = RelocationScope::Yard;
        else fail(ErrorCode::InvalidStrategy, "relocation_scope must be 'block' or 'yard'");
      } else if (key == "key" && s.kind_ == StrategyKind::CategorySegregation) {
        if (value == "destination_port") s.key_ = SegregationKey::DestinationPort;
        else if (value == "departure_window_hours") s.key_ = SegregationKey::DepartureWindow;
        else fail(ErrorCode::InvalidStrategy, "key must be 'destination_port' or 'departure_window_hours'");
      } else if (key == "window_hours" && s.kind_ == StrategyKind::CategorySegregation) {
        if (!value.is_number() || !(value.get<double>() > 0.0)) {
          fail(ErrorCode::InvalidStrategy, "window_hours must be a positive number");
        }
        s.window_hours_ = value.get<double>();
      } else {
        fail(ErrorCode::InvalidStrategy, "parameter '" + key + "' is not accepted by " + spec.name);
      }
    }
    if (spec.params.contains("window_hours") && s.key_ != SegregationKey::DepartureWindow) {
      fail(ErrorCode::InvalidStrategy, "window_hours only applies to key=departure_window_hours");
    }
    return s;
  }

  StrategyKind kind() const { return kind_; }
  const StrategySpec& spec() const { return spec_; }
  RelocationScope relocation_scope() const { return scope_; }

  SlotAddress choose_placement(const YardState& snapshot, const ContainerRecord& container, Rng& rng,
                               const PlacementContext& ctx = {}) const {
    std::vector<StackId> candidates;
    if (ctx.preferred_block && snapshot.layout().find(*ctx.preferred_block) != nullptr) {
      candidates = open_stacks(snapshot, [&](const StackId& s) { return s.block_id == *ctx.preferred_block; });
    }
    if (candidates.empty()) {
      candidates = open_stacks(snapshot, [](const StackId&) { return true; });
    }
    if (candidates.empty()) {
      fail(ErrorCode::NoFeasibleSlot, "no stack has room for " + container.container_id);
    }
    const std::optional<StackId> origin =
        ctx.crane_position ? std::optional<StackId>(ctx.crane_position->stack()) : std::nullopt;
    return top_slot(snapshot, pick(snapshot, container, candidates, origin, rng));
  }

  /// Slot for a blocker lifted off `forbidden_stack` (the departing
  /// container's stack), which is never a candidate.
  SlotAddress choose_relocation(const YardState& snapshot, const ContainerRecord& blocker,
                                const StackId& forbidden_stack, Rng& rng) const {
    const std::vector<StackId> candidates = open_stacks(snapshot, [&](const StackId& s) {
      if (s == forbidden_stack) return false;
      return scope_ == RelocationScope::Yard || s.block_id == forbidden_stack.block_id;
    });
    if (candidates.empty()) {
      fail(ErrorCode::NoFeasibleSlot, "nowhere to relocate " + blocker.container_id + " off " +
                                          forbidden_stack.block_id + "." + std::to_string(forbidden_stack.bay) +
                                          "." + std::to_string(forbidden_stack.row));
    }
    const std::optional<StackId> origin =
        blocker.current_slot ? std::optional<StackId>(blocker.current_slot->stack()) : std::nullopt;
    return top_slot(snapshot, pick(snapshot, blocker, candidates, origin, rng));
  }

  /// Group label used by category_segregation.
  std::string group_of(const ContainerRecord& rec) const {
    if (key_ == SegregationKey::DestinationPort) return "dst:" + rec.destination_port.value_or("");
    if (!rec.departure_time) return "win:unbooked";
    const double window_s = window_hours_ * 3600.0;
    return "win:" + std::to_string(static_cast<std::int64_t>(
                        std::floor(static_cast<double>(rec.departure_time->seconds) / window_s)));
  }

 private:
  Strategy() = default;

  // Stacks with room that pass `keep`, sorted by (block_id, bay, row).
  template <typename Pred>
  static std::vector<StackId> open_stacks(const YardState& snapshot, Pred keep) {
    std::vector<StackId> out;
    for (const BlockSpec& b : snapshot.layout().blocks()) {
      for (int bay = 1; bay <= b.bay_count; ++bay) {
        for (int row = 1; row <= b.row_count; ++row) {
          StackId id{b.block_id, bay, row};
          if (snapshot.height(id) < b.max_tier && keep(id)) out.push_back(std::move(id));
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static SlotAddress top_slot(const YardState& snapshot, const StackId& s) {
    return SlotAddress{s.block_id, s.bay, s.row, snapshot.height(s) + 1};
  }

  StackId pick(const YardState& snapshot, const ContainerRecord& container,
               const std::vector<StackId>& candidates, const std::optional<StackId>& origin,
               Rng& rng) const {
    switch (kind_) {
      case StrategyKind::RandomFeasible:
        return candidates[rng.uniform_index(candidates.size())];
      case StrategyKind::LowestTier:
        return *std::min_element(candidates.begin(), candidates.end(),
                                 [&](const StackId& a, const StackId& b) {
                                   return snapshot.height(a) < snapshot.height(b);
                                 });
      case StrategyKind::NearestSlot: {
        if (!origin) return candidates.front();
        return *std::min_element(candidates.begin(), candidates.end(),
                                 [&](const StackId& a, const StackId& b) {
                                   return travel_distance(snapshot.layout(), *origin, a) <
                                          travel_distance(snapshot.layout(), *origin, b);
                                 });
      }
      case StrategyKind::CategorySegregation:
        return pick_segregated(snapshot, container, candidates);
      case StrategyKind::Identity:
        break;
    }
    fail(ErrorCode::InvalidStrategy, "identity replays logged slots and cannot choose one");
  }

  // Prefer a bay already holding the group (fewest foreign containers first),
  // otherwise the emptiest bay with room. Inside the bay prefer stacks free of
  // other groups, then the lowest stack.
  StackId pick_segregated(const YardState& snapshot, const ContainerRecord& container,
                          const std::vector<StackId>& candidates) const {
    const std::string group = group_of(container);
    auto stack_mix = [&](const StackId& s) {
      int own = 0, foreign = 0;
      for (const std::string& id : snapshot.stack(s)) {
        (group_of(snapshot.container(id)) == group ? own : foreign) += 1;
      }
      return std::pair{own, foreign};
    };
    struct BayTally {
      int own = 0;
      int foreign = 0;
    };
    std::map<std::pair<std::string, int>, BayTally> bays;
    for (const StackId& c : candidates) {
      auto key = std::pair{c.block_id, c.bay};
      if (bays.contains(key)) continue;
      BayTally tally;
      const int rows = snapshot.layout().block(c.block_id).row_count;
      for (int row = 1; row <= rows; ++row) {
        auto [own, foreign] = stack_mix({c.block_id, c.bay, row});
        tally.own += own;
        tally.foreign += foreign;
      }
      bays.emplace(std::move(key), tally);
    }
    std::optional<std::pair<std::string, int>> chosen;
    for (const auto& [key, tally] : bays) {
      if (tally.own == 0) continue;
      if (!chosen || tally.foreign < bays.at(*chosen).foreign) chosen = key;
    }
    if (!chosen) {
      for (const auto& [key, tally] : bays) {
        if (!chosen || tally.own + tally.foreign < bays.at(*chosen).own + bays.at(*chosen).foreign) {
          chosen = key;
        }
      }
    }
    std::optional<StackId> best;
    std::tuple<bool, int> best_key{};
    for (const StackId& c : candidates) {
      if (c.block_id != chosen->first || c.bay != chosen->second) continue;
      const std::tuple<bool, int> key{stack_mix(c).second > 0, snapshot.height(c)};
      if (!best || key < best_key) {
        best = c;
        best_key = key;
      }
    }
    return *best;
  }

  StrategySpec spec_;
  StrategyKind kind_ = StrategyKind::RandomFeasible;
  RelocationScope scope_ = RelocationScope::Block;
  SegregationKey key_ = SegregationKey::DestinationPort;
  double window_hours_ = 24.0;
};

}  // namespace yardtwin
