#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace yardtwin {

enum class ErrorCode {
  InvalidLayout,
  AddressOutOfRange,
  SlotOccupied,
  FloatingPlacement,
  DuplicateContainer,
  SlotEmpty,
  NotTopmost,
  SlotMismatch,
  UnknownContainer,
  MalformedLine,
  UnknownEventKind,
  MissingRequiredField,
  BadTimestamp,
  ReplayHalted,
  NoFeasibleSlot,
  WindowMismatch,
  BadWindow,
  CapacityExceeded,
  RelocationImpossible,
  InvalidStrategy,
  UnknownEquipmentLayout,
  NoDataAtTime,
  UnknownJob,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLayout: return "InvalidLayout";
    case ErrorCode::AddressOutOfRange: return "AddressOutOfRange";
    case ErrorCode::SlotOccupied: return "SlotOccupied";
    case ErrorCode::FloatingPlacement: return "FloatingPlacement";
    case ErrorCode::DuplicateContainer: return "DuplicateContainer";
    case ErrorCode::SlotEmpty: return "SlotEmpty";
    case ErrorCode::NotTopmost: return "NotTopmost";
    case ErrorCode::SlotMismatch: return "SlotMismatch";
    case ErrorCode::UnknownContainer: return "UnknownContainer";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::UnknownEventKind: return "UnknownEventKind";
    case ErrorCode::MissingRequiredField: return "MissingRequiredField";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::ReplayHalted: return "ReplayHalted";
    case ErrorCode::NoFeasibleSlot: return "NoFeasibleSlot";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::RelocationImpossible: return "RelocationImpossible";
    case ErrorCode::InvalidStrategy: return "InvalidStrategy";
    case ErrorCode::UnknownEquipmentLayout: return "UnknownEquipmentLayout";
    case ErrorCode::NoDataAtTime: return "NoDataAtTime";
    case ErrorCode::UnknownJob: return "UnknownJob";
  }
  return "Unknown";
}

/// Every failure raised by the library. `seq` is set when the failure can be
/// pinned to one event of a log; `cause` keeps the underlying code when an
/// error is wrapped (ReplayHalted wrapping NotTopmost, for instance).
class YardError : public std::runtime_error {
 public:
  YardError(ErrorCode code, const std::string& message,
            std::optional<std::uint64_t> seq = std::nullopt,
            std::optional<ErrorCode> cause = std::nullopt)
      : std::runtime_error(message), code_(code), seq_(seq), cause_(cause) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> seq() const noexcept { return seq_; }
  std::optional<ErrorCode> cause() const noexcept { return cause_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> seq_;
  std::optional<ErrorCode> cause_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw YardError(code, std::string(code_name(code)) + ": " + message);
}

}  // namespace yardtwin
