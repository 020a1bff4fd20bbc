#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "yardtwin/error.hpp"

namespace yardtwin {

struct BlockSpec {
  std::string block_id;
  int bay_count = 1;
  int row_count = 1;
  int max_tier = 1;
  double bay_pitch_m = 1.0;
  double row_pitch_m = 1.0;

  int stack_count() const { return bay_count * row_count; }
  int capacity() const { return stack_count() * max_tier; }

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// One vertical pile: a (block, bay, row) triple. Orders lexicographically,
/// which is the tie-break order used everywhere a choice between stacks is
/// made.
struct StackId {
  std::string block_id;
  int bay = 1;
  int row = 1;

  friend auto operator<=>(const StackId&, const StackId&) = default;
};

/// Yard coordinate. Tier 1 is the ground.
struct SlotAddress {
  std::string block_id;
  int bay = 1;
  int row = 1;
  int tier = 1;

  StackId stack() const { return StackId{block_id, bay, row}; }
  friend auto operator<=>(const SlotAddress&, const SlotAddress&) = default;
};

// Slot text grammar (canonical, no alternatives accepted):
//   slot  := block '.' bay '.' row '.' tier
//   block := [A-Za-z0-9_-]+
//   bay   := two digits when < 100 ("05", "12"), otherwise plain decimal
//   row   := decimal >= 1, no leading zero
//   tier  := decimal >= 1, no leading zero
inline std::string format_slot(const SlotAddress& slot) {
  std::string bay = std::to_string(slot.bay);
  if (bay.size() < 2) bay.insert(0, 2 - bay.size(), '0');
  return slot.block_id + "." + bay + "." + std::to_string(slot.row) + "." +
         std::to_string(slot.tier);
}

namespace detail {

inline bool parse_decimal(std::string_view text, int& out) {
  if (text.empty() || text.size() > 6) return false;
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

inline bool valid_block_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

}  // namespace detail

inline SlotAddress parse_slot(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    parts.push_back(text.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  SlotAddress slot;
  bool ok = parts.size() == 4 && detail::valid_block_id(parts[0]) &&
            detail::parse_decimal(parts[1], slot.bay) &&
            detail::parse_decimal(parts[2], slot.row) &&
            detail::parse_decimal(parts[3], slot.tier);
  if (ok) {
    slot.block_id = std::string(parts[0]);
    ok = slot.bay >= 1 && slot.row >= 1 && slot.tier >= 1 &&
         format_slot(slot) == text;
  }
  if (!ok) {
    fail(ErrorCode::MalformedLine,
         "slot '" + std::string(text) + "' is not BLOCK.BB.ROW.TIER");
  }
  return slot;
}

class YardLayout {
 public:
  YardLayout() = default;

  explicit YardLayout(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const BlockSpec& b = blocks_[i];
      if (!detail::valid_block_id(b.block_id)) {
        fail(ErrorCode::InvalidLayout, "bad block id '" + b.block_id + "'");
      }
      if (b.bay_count < 1 || b.row_count < 1 || b.max_tier < 1) {
        fail(ErrorCode::InvalidLayout, "block " + b.block_id + " has a zero dimension");
      }
      if (!(b.bay_pitch_m > 0.0) || !(b.row_pitch_m > 0.0)) {
        fail(ErrorCode::InvalidLayout, "block " + b.block_id + " has non-positive pitch");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (blocks_[j].block_id == b.block_id) {
          fail(ErrorCode::InvalidLayout, "duplicate block id " + b.block_id);
        }
      }
    }
  }

  const std::vector<BlockSpec>& blocks() const { return blocks_; }

  const BlockSpec* find(std::string_view block_id) const {
    for (const BlockSpec& b : blocks_) {
      if (b.block_id == block_id) return &b;
    }
    return nullptr;
  }

  const BlockSpec& block(std::string_view block_id) const {
    const BlockSpec* b = find(block_id);
    if (b == nullptr) fail(ErrorCode::AddressOutOfRange, "unknown block " + std::string(block_id));
    return *b;
  }

  std::size_t block_index(std::string_view block_id) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].block_id == block_id) return i;
    }
    fail(ErrorCode::AddressOutOfRange, "unknown block " + std::string(block_id));
  }

  bool contains(const StackId& s) const {
    const BlockSpec* b = find(s.block_id);
    return b != nullptr && s.bay >= 1 && s.bay <= b->bay_count && s.row >= 1 &&
           s.row <= b->row_count;
  }

  bool contains(const SlotAddress& slot) const {
    const BlockSpec* b = find(slot.block_id);
    return contains(slot.stack()) && slot.tier >= 1 && slot.tier <= b->max_tier;
  }

  void require(const SlotAddress& slot) const {
    if (!contains(slot)) fail(ErrorCode::AddressOutOfRange, format_slot(slot));
  }

  int capacity() const {
    int total = 0;
    for (const BlockSpec& b : blocks_) total += b.capacity();
    return total;
  }

  friend bool operator==(const YardLayout&, const YardLayout&) = default;

 private:
  std::vector<BlockSpec> blocks_;
};

inline void to_json(nlohmann::json& j, const BlockSpec& b) {
  j = nlohmann::json{{"block_id", b.block_id},       {"bay_count", b.bay_count},
                     {"row_count", b.row_count},     {"max_tier", b.max_tier},
                     {"bay_pitch_m", b.bay_pitch_m}, {"row_pitch_m", b.row_pitch_m}};
}

inline void to_json(nlohmann::json& j, const YardLayout& layout) {
  j = nlohmann::json{{"blocks", layout.blocks()}};
}

inline YardLayout layout_from_json(const nlohmann::json& j) {
  try {
    std::vector<BlockSpec> blocks;
    for (const auto& jb : j.at("blocks")) {
      BlockSpec b;
      b.block_id = jb.at("block_id").get<std::string>();
      b.bay_count = jb.at("bay_count").get<int>();
      b.row_count = jb.at("row_count").get<int>();
      b.max_tier = jb.at("max_tier").get<int>();
      b.bay_pitch_m = jb.at("bay_pitch_m").get<double>();
      b.row_pitch_m = jb.at("row_pitch_m").get<double>();
      blocks.push_back(std::move(b));
    }
    return YardLayout(std::move(blocks));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidLayout, e.what());
  }
}

}  // namespace yardtwin
