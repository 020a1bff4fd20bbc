#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <string_view>

#include "yardtwin/error.hpp"
#include "yardtwin/layout.hpp"

namespace yardtwin {

// Gantry travels along bays, trolley along rows.
enum class TravelMetric { Rectilinear, Chebyshev };

struct TravelOptions {
  TravelMetric metric = TravelMetric::Rectilinear;
  // Flat cost charged for moving between two different blocks.
  double inter_block_m = 0.0;
};

inline TravelMetric metric_from_name(std::string_view name) {
  if (name == "rectilinear") return TravelMetric::Rectilinear;
  if (name == "chebyshev") return TravelMetric::Chebyshev;
  fail(ErrorCode::InvalidStrategy, "unknown travel metric '" + std::string(name) + "'");
}

/// Crane travel in meters between two stack positions; tiers do not count.
inline double travel_distance(const YardLayout& layout, const StackId& a, const StackId& b,
                              const TravelOptions& opts = {}) {
  const BlockSpec* block_a = layout.find(a.block_id);
  const BlockSpec* block_b = layout.find(b.block_id);
  if (block_a == nullptr || block_b == nullptr) {
    fail(ErrorCode::UnknownEquipmentLayout,
         "position in unknown block " + (block_a == nullptr ? a.block_id : b.block_id));
  }
  if (a.block_id != b.block_id) return opts.inter_block_m;
  const double gantry = std::abs(a.bay - b.bay) * block_a->bay_pitch_m;
  const double trolley = std::abs(a.row - b.row) * block_a->row_pitch_m;
  return opts.metric == TravelMetric::Rectilinear ? gantry + trolley : std::max(gantry, trolley);
}

}  // namespace yardtwin
