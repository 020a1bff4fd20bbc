#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "yardtwin/events.hpp"
#include "yardtwin/layout.hpp"

namespace yardtwin::cli {

/// Unreadable inputs are usage errors (exit 2), not domain errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline YardLayout load_layout(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidLayout, path + ": " + e.what());
  }
  return layout_from_json(j);
}

inline EventLog load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  return parse_log(in);
}

}  // namespace yardtwin::cli
