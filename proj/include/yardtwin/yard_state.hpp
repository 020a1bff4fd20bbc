#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "yardtwin/error.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/time.hpp"

namespace yardtwin {

struct ContainerRecord {
  std::string container_id;
  std::string iso_type;
  std::optional<std::string> origin_port;
  std::optional<std::string> destination_port;
  Timestamp arrival_time;
  bool departure_booked = false;
  // Booked departure instant, when the feed announces one.
  std::optional<Timestamp> departure_time;
  int rehandle_count = 0;
  std::optional<SlotAddress> current_slot;

  friend bool operator==(const ContainerRecord&, const ContainerRecord&) = default;
};

/// Slot-accurate yard contents. Copies are independent values; a copy handed
/// to a reader is a snapshot. Mutation goes through place/remove/shift, which
/// keep gravity and the slot/container bijection intact or throw without
/// modifying anything.
class YardState {
 public:
  YardState() : layout_(std::make_shared<const YardLayout>()) {}

  explicit YardState(YardLayout layout)
      : YardState(std::make_shared<const YardLayout>(std::move(layout))) {}

  explicit YardState(std::shared_ptr<const YardLayout> layout) : layout_(std::move(layout)) {
    stacks_.reserve(layout_->blocks().size());
    for (const BlockSpec& b : layout_->blocks()) {
      stacks_.emplace_back(static_cast<std::size_t>(b.stack_count()));
    }
  }

  const YardLayout& layout() const { return *layout_; }
  const std::shared_ptr<const YardLayout>& layout_ptr() const { return layout_; }

  Timestamp clock() const { return clock_; }
  void set_clock(Timestamp t) { clock_ = t; }

  /// Container ids of a stack, ground tier first.
  const std::vector<std::string>& stack(const StackId& id) const {
    return stacks_[block_pos(id.block_id)][stack_pos(id)];
  }

  int height(const StackId& id) const { return static_cast<int>(stack(id).size()); }

  std::optional<std::string> at(const SlotAddress& slot) const {
    layout_->require(slot);
    const auto& s = stack(slot.stack());
    if (slot.tier > static_cast<int>(s.size())) return std::nullopt;
    return s[static_cast<std::size_t>(slot.tier - 1)];
  }

  const std::map<std::string, ContainerRecord>& containers() const { return containers_; }

  const ContainerRecord* find(const std::string& container_id) const {
    auto it = containers_.find(container_id);
    return it == containers_.end() ? nullptr : &it->second;
  }

  const ContainerRecord& container(const std::string& container_id) const {
    const ContainerRecord* rec = find(container_id);
    if (rec == nullptr) fail(ErrorCode::UnknownContainer, container_id);
    return *rec;
  }

  bool in_yard(const std::string& container_id) const {
    const ContainerRecord* rec = find(container_id);
    return rec != nullptr && rec->current_slot.has_value();
  }

  std::size_t in_yard_count() const { return in_yard_; }

  int block_count(const std::string& block_id) const {
    int n = 0;
    for (const auto& s : stacks_[block_pos(block_id)]) n += static_cast<int>(s.size());
    return n;
  }

  const std::map<std::string, SlotAddress>& equipment() const { return equipment_; }

  std::optional<SlotAddress> equipment_position(const std::string& equipment_id) const {
    auto it = equipment_.find(equipment_id);
    if (it == equipment_.end()) return std::nullopt;
    return it->second;
  }

  void set_equipment_position(const std::string& equipment_id, const SlotAddress& pos) {
    layout_->require(pos);
    equipment_[equipment_id] = pos;
  }

  void place(ContainerRecord container, const SlotAddress& slot) {
    layout_->require(slot);
    auto& s = mutable_stack(slot.stack());
    if (in_yard(container.container_id)) {
      fail(ErrorCode::DuplicateContainer, container.container_id + " is already at " +
                                              format_slot(*find(container.container_id)->current_slot));
    }
    if (slot.tier <= static_cast<int>(s.size())) {
      fail(ErrorCode::SlotOccupied, format_slot(slot) + " holds " +
                                        s[static_cast<std::size_t>(slot.tier - 1)]);
    }
    if (slot.tier != static_cast<int>(s.size()) + 1) {
      fail(ErrorCode::FloatingPlacement,
           format_slot(slot) + " is above an empty tier (stack height " +
               std::to_string(s.size()) + ")");
    }
    // A returning container keeps its history of rehandles.
    if (const ContainerRecord* previous = find(container.container_id)) {
      container.rehandle_count = std::max(container.rehandle_count, previous->rehandle_count);
    }
    container.current_slot = slot;
    s.push_back(container.container_id);
    containers_[container.container_id] = std::move(container);
    ++in_yard_;
  }

  /// Takes the topmost container off the stack at `slot`. The departed record
  /// stays in containers() with current_slot cleared.
  ContainerRecord remove(const SlotAddress& slot) {
    layout_->require(slot);
    auto& s = mutable_stack(slot.stack());
    if (slot.tier > static_cast<int>(s.size())) fail(ErrorCode::SlotEmpty, format_slot(slot));
    if (slot.tier != static_cast<int>(s.size())) {
      fail(ErrorCode::NotTopmost, format_slot(slot) + " has " +
                                      std::to_string(s.size() - static_cast<std::size_t>(slot.tier)) +
                                      " container(s) above it");
    }
    ContainerRecord& rec = containers_.at(s.back());
    s.pop_back();
    rec.current_slot.reset();
    --in_yard_;
    return rec;
  }

  /// Relocation of one container: remove from `from`, place at `to`, and count
  /// one rehandle. Checks both ends before touching anything.
  void shift(const SlotAddress& from, const SlotAddress& to) {
    layout_->require(from);
    layout_->require(to);
    const auto& src = stack(from.stack());
    if (from.tier > static_cast<int>(src.size())) fail(ErrorCode::SlotEmpty, format_slot(from));
    if (from.tier != static_cast<int>(src.size())) fail(ErrorCode::NotTopmost, format_slot(from));
    const auto& dst = stack(to.stack());
    const int dst_height = static_cast<int>(dst.size()) - (from.stack() == to.stack() ? 1 : 0);
    if (to.tier <= dst_height) fail(ErrorCode::SlotOccupied, format_slot(to));
    if (to.tier != dst_height + 1) fail(ErrorCode::FloatingPlacement, format_slot(to));
    ContainerRecord rec = remove(from);
    rec.rehandle_count += 1;
    place(std::move(rec), to);
  }

  /// Occupied tiers strictly above the container: the rehandles needed to
  /// retrieve it right now.
  int blocking_count(const std::string& container_id) const {
    const ContainerRecord* rec = find(container_id);
    if (rec == nullptr || !rec->current_slot) {
      fail(ErrorCode::UnknownContainer, container_id + " is not in the yard");
    }
    return height(rec->current_slot->stack()) - rec->current_slot->tier;
  }

  /// Heights of every row of one bay, row 1 first.
  std::vector<int> stack_heights(const std::string& block_id, int bay) const {
    const BlockSpec* b = layout_->find(block_id);
    if (b == nullptr || bay < 1 || bay > b->bay_count) {
      fail(ErrorCode::AddressOutOfRange, block_id + " bay " + std::to_string(bay));
    }
    std::vector<int> heights;
    heights.reserve(static_cast<std::size_t>(b->row_count));
    for (int row = 1; row <= b->row_count; ++row) heights.push_back(height({block_id, bay, row}));
    return heights;
  }

  friend bool operator==(const YardState& a, const YardState& b) {
    return *a.layout_ == *b.layout_ && a.clock_ == b.clock_ && a.stacks_ == b.stacks_ &&
           a.containers_ == b.containers_ && a.equipment_ == b.equipment_;
  }

 private:
  std::size_t block_pos(const std::string& block_id) const { return layout_->block_index(block_id); }

  std::size_t stack_pos(const StackId& id) const {
    const BlockSpec& b = layout_->block(id.block_id);
    if (id.bay < 1 || id.bay > b.bay_count || id.row < 1 || id.row > b.row_count) {
      fail(ErrorCode::AddressOutOfRange,
           id.block_id + " bay " + std::to_string(id.bay) + " row " + std::to_string(id.row));
    }
    return static_cast<std::size_t>((id.bay - 1) * b.row_count + (id.row - 1));
  }

  std::vector<std::string>& mutable_stack(const StackId& id) {
    return stacks_[block_pos(id.block_id)][stack_pos(id)];
  }

  std::shared_ptr<const YardLayout> layout_;
  Timestamp clock_{};
  std::vector<std::vector<std::vector<std::string>>> stacks_;
  std::map<std::string, ContainerRecord> containers_;
  std::map<std::string, SlotAddress> equipment_;
  std::size_t in_yard_ = 0;
};

inline nlohmann::json record_to_json(const ContainerRecord& rec) {
  using nlohmann::json;
  json j{{"container_id", rec.container_id},
         {"iso_type", rec.iso_type},
         {"origin_port", rec.origin_port ? json(*rec.origin_port) : json(nullptr)},
         {"destination_port", rec.destination_port ? json(*rec.destination_port) : json(nullptr)},
         {"arrival_time", format_timestamp(rec.arrival_time)},
         {"departure_booked", rec.departure_booked},
         {"rehandle_count", rec.rehandle_count},
         {"current_slot", rec.current_slot ? json(format_slot(*rec.current_slot)) : json(nullptr)}};
  if (rec.departure_time) j["departure_time"] = format_timestamp(*rec.departure_time);
  return j;
}

/// Snapshot wire form: {clock, blocks: [{block_id, bays: [{bay, rows: [{row,
/// stack}]}]}], containers: {id: record}}. Every bay and row of the layout is
/// listed, empty ones included.
inline nlohmann::json snapshot_to_json(const YardState& state) {
  using nlohmann::json;
  json blocks = json::array();
  for (const BlockSpec& b : state.layout().blocks()) {
    json bays = json::array();
    for (int bay = 1; bay <= b.bay_count; ++bay) {
      json rows = json::array();
      for (int row = 1; row <= b.row_count; ++row) {
        rows.push_back(json{{"row", row}, {"stack", state.stack({b.block_id, bay, row})}});
      }
      bays.push_back(json{{"bay", bay}, {"rows", std::move(rows)}});
    }
    blocks.push_back(json{{"block_id", b.block_id}, {"bays", std::move(bays)}});
  }
  json containers = json::object();
  for (const auto& [id, rec] : state.containers()) containers[id] = record_to_json(rec);
  return json{{"clock", format_timestamp(state.clock())},
              {"blocks", std::move(blocks)},
              {"containers", std::move(containers)}};
}

}  // namespace yardtwin
