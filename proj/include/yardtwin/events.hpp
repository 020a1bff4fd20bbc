#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "yardtwin/error.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/time.hpp"
#include "yardtwin/yard_state.hpp"

namespace yardtwin {

enum class EventKind { GateIn, GateOut, VesselDischarge, VesselLoad, YardShift, CranePos };

constexpr std::string_view kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::GateIn: return "GATE_IN";
    case EventKind::GateOut: return "GATE_OUT";
    case EventKind::VesselDischarge: return "VESSEL_DISCHARGE";
    case EventKind::VesselLoad: return "VESSEL_LOAD";
    case EventKind::YardShift: return "YARD_SHIFT";
    case EventKind::CranePos: return "CRANE_POS";
  }
  return "?";
}

inline std::optional<EventKind> kind_from_name(std::string_view name) {
  for (EventKind k : {EventKind::GateIn, EventKind::GateOut, EventKind::VesselDischarge,
                      EventKind::VesselLoad, EventKind::YardShift, EventKind::CranePos}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

constexpr bool is_arrival(EventKind k) {
  return k == EventKind::GateIn || k == EventKind::VesselDischarge;
}

constexpr bool is_departure(EventKind k) {
  return k == EventKind::GateOut || k == EventKind::VesselLoad;
}

struct YardEvent {
  std::uint64_t seq = 0;
  Timestamp timestamp;
  EventKind kind = EventKind::GateIn;
  std::optional<std::string> container_id;
  std::optional<SlotAddress> from_slot;
  std::optional<SlotAddress> to_slot;
  std::optional<std::string> equipment_id;
  nlohmann::json attrs = nlohmann::json::object();
  bool synthetic = false;

  friend bool operator==(const YardEvent&, const YardEvent&) = default;
};

/// Events ordered by (timestamp, seq); seq values are unique.
struct EventLog {
  std::vector<YardEvent> events;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

inline void sort_log(EventLog& log) {
  std::stable_sort(log.events.begin(), log.events.end(), [](const YardEvent& a, const YardEvent& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.seq < b.seq;
  });
}

namespace detail {

inline const std::set<std::string, std::less<>>& known_event_fields() {
  static const std::set<std::string, std::less<>> fields{
      "seq", "ts", "kind", "container", "from", "to", "equipment", "attrs", "synthetic"};
  return fields;
}

[[noreturn]] inline void line_error(ErrorCode code, std::size_t line_no, const std::string& what) {
  throw YardError(code, std::string(code_name(code)) + " at line " + std::to_string(line_no) + ": " + what);
}

inline void require_shape(const YardEvent& e, std::size_t line_no) {
  const std::string kind(kind_name(e.kind));
  auto missing = [&](const char* field) {
    line_error(ErrorCode::MissingRequiredField, line_no, kind + " requires '" + field + "'");
  };
  auto unexpected = [&](const char* field) {
    line_error(ErrorCode::MalformedLine, line_no, kind + " must not carry '" + field + "'");
  };
  if (e.kind == EventKind::CranePos) {
    if (!e.equipment_id) missing("equipment");
    if (!e.to_slot) missing("to");
    if (e.from_slot) unexpected("from");
    if (e.container_id) unexpected("container");
    return;
  }
  if (!e.container_id) missing("container");
  if (is_arrival(e.kind)) {
    if (!e.to_slot) missing("to");
    if (e.from_slot) unexpected("from");
  } else if (is_departure(e.kind)) {
    if (!e.from_slot) missing("from");
    if (e.to_slot) unexpected("to");
  } else {
    if (!e.from_slot) missing("from");
    if (!e.to_slot) missing("to");
  }
}

inline YardEvent parse_event_line(std::string_view line, std::size_t line_no, std::uint64_t default_seq) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    line_error(ErrorCode::MalformedLine, line_no, e.what());
  }
  if (!j.is_object()) line_error(ErrorCode::MalformedLine, line_no, "event is not a JSON object");

  auto string_field = [&](const char* name) -> std::optional<std::string> {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) line_error(ErrorCode::MalformedLine, line_no, std::string("'") + name + "' must be a string");
    return it->get<std::string>();
  };
  auto slot_field = [&](const char* name) -> std::optional<SlotAddress> {
    auto text = string_field(name);
    if (!text) return std::nullopt;
    try {
      return parse_slot(*text);
    } catch (const YardError& e) {
      line_error(ErrorCode::MalformedLine, line_no, e.what());
    }
  };

  YardEvent e;
  e.seq = default_seq;
  if (auto it = j.find("seq"); it != j.end()) {
    if (!it->is_number_unsigned()) line_error(ErrorCode::MalformedLine, line_no, "'seq' must be a non-negative integer");
    e.seq = it->get<std::uint64_t>();
  }
  auto ts = string_field("ts");
  if (!ts) line_error(ErrorCode::MissingRequiredField, line_no, "every event requires 'ts'");
  try {
    e.timestamp = parse_timestamp(*ts);
  } catch (const YardError& err) {
    line_error(ErrorCode::MalformedLine, line_no, err.what());
  }
  auto kind = string_field("kind");
  if (!kind) line_error(ErrorCode::MissingRequiredField, line_no, "every event requires 'kind'");
  auto parsed_kind = kind_from_name(*kind);
  if (!parsed_kind) line_error(ErrorCode::UnknownEventKind, line_no, *kind);
  e.kind = *parsed_kind;
  e.container_id = string_field("container");
  e.from_slot = slot_field("from");
  e.to_slot = slot_field("to");
  e.equipment_id = string_field("equipment");
  if (auto it = j.find("attrs"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) line_error(ErrorCode::MalformedLine, line_no, "'attrs' must be an object");
    e.attrs = *it;
  }
  if (auto it = j.find("synthetic"); it != j.end()) {
    if (!it->is_boolean()) line_error(ErrorCode::MalformedLine, line_no, "'synthetic' must be a boolean");
    e.synthetic = it->get<bool>();
  }
  // Fields this schema does not know travel along in attrs.
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known_event_fields().contains(it.key()) && !e.attrs.contains(it.key())) {
      e.attrs[it.key()] = it.value();
    }
  }
  require_shape(e, line_no);
  return e;
}

}  // namespace detail

/// Reads JSONL, one event per non-blank line. Events without an explicit
/// "seq" take their 0-based position among event lines. The result is
/// stable-sorted by (timestamp, seq).
inline EventLog parse_log(std::istream& in) {
  EventLog log;
  std::set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    YardEvent e = detail::parse_event_line(line, line_no, log.events.size());
    if (!seen.insert(e.seq).second) {
      detail::line_error(ErrorCode::MalformedLine, line_no, "duplicate seq " + std::to_string(e.seq));
    }
    log.events.push_back(std::move(e));
  }
  sort_log(log);
  return log;
}

inline EventLog parse_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_log(in);
}

inline nlohmann::ordered_json event_to_json(const YardEvent& e) {
  nlohmann::ordered_json j;
  j["seq"] = e.seq;
  j["ts"] = format_timestamp(e.timestamp);
  j["kind"] = kind_name(e.kind);
  if (e.container_id) j["container"] = *e.container_id;
  if (e.from_slot) j["from"] = format_slot(*e.from_slot);
  if (e.to_slot) j["to"] = format_slot(*e.to_slot);
  if (e.equipment_id) j["equipment"] = *e.equipment_id;
  if (!e.attrs.empty()) j["attrs"] = e.attrs;
  if (e.synthetic) j["synthetic"] = true;
  return j;
}

inline void write_log(std::ostream& out, const EventLog& log) {
  for (const YardEvent& e : log.events) out << event_to_json(e).dump() << '\n';
}

inline std::string serialize_log(const EventLog& log) {
  std::ostringstream out;
  write_log(out, log);
  return out.str();
}

/// Container record announced by an arrival event. Recognised attrs:
/// iso_type, origin_port, destination_port, departure_booked, departure_time.
inline ContainerRecord record_from_arrival(const YardEvent& e) {
  ContainerRecord rec;
  rec.container_id = e.container_id.value_or("");
  rec.arrival_time = e.timestamp;
  const auto& a = e.attrs;
  auto text = [&](const char* key) -> std::optional<std::string> {
    auto it = a.find(key);
    if (it == a.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  rec.iso_type = text("iso_type").value_or("");
  rec.origin_port = text("origin_port");
  rec.destination_port = text("destination_port");
  if (auto it = a.find("departure_booked"); it != a.end() && it->is_boolean()) {
    rec.departure_booked = it->get<bool>();
  }
  if (auto t = text("departure_time")) {
    try {
      rec.departure_time = parse_timestamp(*t);
    } catch (const YardError&) {
      // Unparseable announcements are ignored, the container is still admitted.
    }
  }
  return rec;
}

struct Violation {
  std::uint64_t seq = 0;
  std::string code;  // AddressOutOfRange | UnknownContainerRetrieval
  std::string detail;

  std::string label() const { return code + "@" + std::to_string(seq); }
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Static replayability check: addresses inside the layout, and every
/// retrieval or shift refers to a container some earlier arrival introduced.
inline std::vector<Violation> validate_against(const EventLog& log, const YardLayout& layout) {
  std::vector<Violation> out;
  std::set<std::string, std::less<>> introduced;
  for (const YardEvent& e : log.events) {
    bool range_ok = true;
    for (const auto* slot : {&e.from_slot, &e.to_slot}) {
      if (*slot && !layout.contains(**slot) && range_ok) {
        out.push_back({e.seq, "AddressOutOfRange", format_slot(**slot)});
        range_ok = false;
      }
    }
    if (!e.container_id) continue;
    if (is_arrival(e.kind)) {
      introduced.insert(*e.container_id);
    } else if (!introduced.contains(*e.container_id)) {
      out.push_back({e.seq, "UnknownContainerRetrieval", *e.container_id});
    }
  }
  return out;
}

}  // namespace yardtwin
