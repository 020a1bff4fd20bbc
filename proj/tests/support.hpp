#pragma once

#include <fstream>
#include <string>

#include "yardtwin/yardtwin.hpp"

#ifndef YARDTWIN_TEST_DATA
#error "YARDTWIN_TEST_DATA must point at tests/data"
#endif

namespace yardtwin::test {

inline std::string data_path(const std::string& name) { return std::string(YARDTWIN_TEST_DATA) + "/" + name; }

inline YardLayout golden_layout() {
  std::ifstream in(data_path("golden_layout.json"));
  return layout_from_json(nlohmann::json::parse(in));
}

inline EventLog golden_log() {
  std::ifstream in(data_path("golden_12.jsonl"));
  return parse_log(in);
}

inline Timestamp ts(const char* text) { return parse_timestamp(text); }

inline SlotAddress slot(const char* text) { return parse_slot(text); }

inline ContainerRecord box(const std::string& id) {
  ContainerRecord r;
  r.container_id = id;
  r.iso_type = "22G1";
  return r;
}

inline YardEvent event(EventKind kind, const char* when, std::optional<std::string> id,
                       std::optional<SlotAddress> from, std::optional<SlotAddress> to,
                       std::optional<std::string> equipment = std::nullopt) {
  YardEvent e;
  e.timestamp = ts(when);
  e.kind = kind;
  e.container_id = std::move(id);
  e.from_slot = std::move(from);
  e.to_slot = std::move(to);
  e.equipment_id = std::move(equipment);
  return e;
}

}  // namespace yardtwin::test
