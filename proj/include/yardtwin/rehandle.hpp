#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "yardtwin/error.hpp"
#include "yardtwin/rng.hpp"

// Expected rehandles per pick for a single bay of R rows and T tiers holding k
// identical containers:
//
//   v_k = sum_i s_k(i) * sum_j p_k(i, j) * v_k(i, j)
//
// s_k is the probability of configuration i after k arrivals under a
// placement model, p_k(i, j) the probability that one uniformly chosen pick
// turns configuration i into the (k-1)-configuration j, and v_k(i, j) the
// rehandles that pick costs. Everything below is exact rational arithmetic.

namespace yardtwin::rehandle {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Stack heights of one bay sorted non-increasing; rows are interchangeable.
struct BayConfiguration {
  std::vector<int> heights;
  int max_tier = 1;

  int rows() const { return static_cast<int>(heights.size()); }
  int k() const { return std::accumulate(heights.begin(), heights.end(), 0); }

  friend auto operator<=>(const BayConfiguration&, const BayConfiguration&) = default;
};

inline BayConfiguration canonical(std::vector<int> heights, int max_tier) {
  std::sort(heights.begin(), heights.end(), std::greater<>());
  return BayConfiguration{std::move(heights), max_tier};
}

inline std::string to_string(const BayConfiguration& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.heights.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c.heights[i]);
  }
  return out + ")";
}

/// Where an arriving container goes. Both are height-symmetric.
enum class PlacementModel {
  UniformNonFull,  // uniform over stacks below max_tier
  LowestStack,     // a lowest stack
};

/// Where a blocker goes when it is lifted off the picked stack.
enum class RelocationPolicy {
  LowestOther,   // lowest other non-full stack, first in canonical order on ties
  UniformOther,  // uniform over the other non-full stacks
};

inline void check_dimensions(int k, int rows, int max_tier) {
  if (rows < 1 || max_tier < 1) fail(ErrorCode::CapacityExceeded, "rows and tiers must be positive");
  if (k < 0 || k > rows * max_tier) {
    fail(ErrorCode::CapacityExceeded, "k=" + std::to_string(k) + " does not fit " + std::to_string(rows) + "x" +
                                          std::to_string(max_tier));
  }
}

/// All partitions of k into at most R parts no larger than T, as canonical
/// configurations, in descending lexicographic order.
inline std::vector<BayConfiguration> enumerate_configurations(int k, int rows, int max_tier) {
  check_dimensions(k, rows, max_tier);
  std::vector<BayConfiguration> out;
  std::vector<int> heights(static_cast<std::size_t>(rows), 0);
  std::function<void(int, int, int)> fill = [&](int index, int remaining, int cap) {
    if (index == rows) {
      if (remaining == 0) out.push_back(BayConfiguration{heights, max_tier});
      return;
    }
    const int top = std::min(cap, remaining);
    for (int h = top; h >= 0; --h) {
      if (h * (rows - index) < remaining) break;
      heights[static_cast<std::size_t>(index)] = h;
      fill(index + 1, remaining - h, h);
    }
    heights[static_cast<std::size_t>(index)] = 0;
  };
  fill(0, k, max_tier);
  return out;
}

using Distribution = std::map<BayConfiguration, Rational>;

/// Probability of each stack index receiving the next arrival.
inline std::vector<Rational> placement_weights(const std::vector<int>& heights, int max_tier, PlacementModel model) {
  std::vector<Rational> w(heights.size(), Rational(0));
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (heights[i] < max_tier) open.push_back(i);
  }
  if (open.empty()) return w;
  if (model == PlacementModel::LowestStack) {
    const int low = heights[*std::min_element(open.begin(), open.end(), [&](std::size_t a, std::size_t b) {
      return heights[a] < heights[b];
    })];
    std::erase_if(open, [&](std::size_t i) { return heights[i] != low; });
  }
  for (std::size_t i : open) w[i] = Rational(1, static_cast<long>(open.size()));
  return w;
}

struct ConfigurationDistribution {
  int k = 0;
  Distribution entries;
};

/// Distribution over configurations after k arrivals into an empty bay,
/// by forward recursion. Each physical row is weighted separately, so rows
/// of equal height contribute their multiplicity.
inline ConfigurationDistribution fill_distribution(int k, int rows, int max_tier,
                                                   PlacementModel model = PlacementModel::UniformNonFull) {
  check_dimensions(k, rows, max_tier);
  Distribution dist{{BayConfiguration{std::vector<int>(static_cast<std::size_t>(rows), 0), max_tier}, Rational(1)}};
  for (int n = 0; n < k; ++n) {
    Distribution next;
    for (const auto& [config, p] : dist) {
      const auto w = placement_weights(config.heights, max_tier, model);
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0) continue;
        std::vector<int> h = config.heights;
        ++h[i];
        next[canonical(std::move(h), max_tier)] += p * w[i];
      }
    }
    dist = std::move(next);
  }
  return ConfigurationDistribution{k, std::move(dist)};
}

struct PickTransition {
  BayConfiguration from;
  BayConfiguration to;
  Rational probability;
  int rehandles = 0;
};

namespace detail {

// Targets for one relocated blocker, as (stack index, probability). `exclude`
// is the picked stack, or -1 when restacking parked containers.
inline std::vector<std::pair<std::size_t, Rational>> relocation_targets(const std::vector<int>& h, int max_tier,
                                                                        long exclude, RelocationPolicy policy) {
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (static_cast<long>(i) != exclude && h[i] < max_tier) open.push_back(i);
  }
  std::vector<std::pair<std::size_t, Rational>> out;
  if (open.empty()) return out;
  if (policy == RelocationPolicy::LowestOther) {
    std::size_t best = open.front();
    for (std::size_t i : open) {
      if (h[i] < h[best]) best = i;
    }
    out.emplace_back(best, Rational(1));
  } else {
    for (std::size_t i : open) out.emplace_back(i, Rational(1, static_cast<long>(open.size())));
  }
  return out;
}

// Relocates `blockers` containers off stack `picked` one by one, removes the
// picked container, then restacks anything that had to be parked outside the
// bay. Accumulates resulting canonical configurations into `out`.
inline void resolve_pick(std::vector<int> h, int max_tier, std::size_t picked, int blockers, int parked,
                         bool removed, const Rational& p, RelocationPolicy policy,
                         std::map<BayConfiguration, Rational>& out) {
  if (blockers > 0) {
    --h[picked];
    const auto targets = relocation_targets(h, max_tier, static_cast<long>(picked), policy);
    if (targets.empty()) {
      resolve_pick(std::move(h), max_tier, picked, blockers - 1, parked + 1, false, p, policy, out);
      return;
    }
    for (const auto& [target, q] : targets) {
      std::vector<int> next = h;
      ++next[target];
      resolve_pick(std::move(next), max_tier, picked, blockers - 1, parked, false, p * q, policy, out);
    }
    return;
  }
  if (!removed) {
    --h[picked];
    removed = true;
  }
  if (parked > 0) {
    for (const auto& [target, q] : relocation_targets(h, max_tier, -1, policy)) {
      std::vector<int> next = h;
      ++next[target];
      resolve_pick(std::move(next), max_tier, picked, 0, parked - 1, true, p * q, policy, out);
    }
    return;
  }
  out[canonical(std::move(h), max_tier)] += p;
}

}  // namespace detail

/// One uniformly chosen container leaves the bay. A container d tiers below
/// the top costs d rehandles; its blockers move top-down under `policy`.
/// A blocker with no other non-full stack is parked outside the bay and put
/// back (by the same policy, any stack) once the pick is done. With a single
/// row there is never anywhere to go, which is RelocationImpossible.
inline std::vector<PickTransition> pick_transitions(const BayConfiguration& config,
                                                    RelocationPolicy policy = RelocationPolicy::LowestOther) {
  const int k = config.k();
  if (k < 1) fail(ErrorCode::CapacityExceeded, "cannot pick from an empty bay");
  std::map<std::pair<BayConfiguration, int>, Rational> agg;
  const Rational per_container(1, k);
  for (std::size_t stack = 0; stack < config.heights.size(); ++stack) {
    const int h = config.heights[stack];
    for (int depth = 0; depth < h; ++depth) {
      if (depth > 0 && config.rows() == 1) {
        fail(ErrorCode::RelocationImpossible,
             "configuration " + to_string(config) + " has a single row; blockers have nowhere to go");
      }
      std::map<BayConfiguration, Rational> outcomes;
      detail::resolve_pick(config.heights, config.max_tier, stack, depth, 0, false, per_container, policy, outcomes);
      for (const auto& [to, p] : outcomes) agg[{to, depth}] += p;
    }
  }
  std::vector<PickTransition> out;
  out.reserve(agg.size());
  for (auto& [key, p] : agg) out.push_back(PickTransition{config, key.first, p, key.second});
  return out;
}

/// v_k assembled term by term: outer sum over the fill distribution, inner
/// sum over the pick kernel weighting each transition's rehandles.
inline Rational expected_rehandles(int k, int rows, int max_tier,
                                   PlacementModel placement = PlacementModel::UniformNonFull,
                                   RelocationPolicy relocation = RelocationPolicy::LowestOther) {
  check_dimensions(k, rows, max_tier);
  if (k < 1) fail(ErrorCode::CapacityExceeded, "k must be at least 1");
  Rational v(0);
  for (const auto& [config, s] : fill_distribution(k, rows, max_tier, placement).entries) {
    Rational inner(0);
    for (const PickTransition& t : pick_transitions(config, relocation)) inner += t.probability * t.rehandles;
    v += s * inner;
  }
  return v;
}

/// Total expected rehandles to retrieve all k containers one uniform pick at
/// a time, carrying the post-pick configuration distribution forward.
inline Rational expected_rehandles_to_empty(int k, int rows, int max_tier,
                                            PlacementModel placement = PlacementModel::UniformNonFull,
                                            RelocationPolicy relocation = RelocationPolicy::LowestOther) {
  check_dimensions(k, rows, max_tier);
  if (k < 1) fail(ErrorCode::CapacityExceeded, "k must be at least 1");
  Distribution dist = fill_distribution(k, rows, max_tier, placement).entries;
  Rational total(0);
  for (int remaining = k; remaining >= 1; --remaining) {
    Distribution next;
    for (const auto& [config, s] : dist) {
      for (const PickTransition& t : pick_transitions(config, relocation)) {
        const Rational w = s * t.probability;
        total += w * t.rehandles;
        next[t.to] += w;
      }
    }
    dist = std::move(next);
  }
  return total;
}

struct MonteCarloResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::int64_t trials = 0;
  // Trials whose pick needed a relocation with nowhere to go; excluded from
  // mean and standard error.
  std::int64_t impossible = 0;
};

/// Fill-then-first-pick episodes on physically distinct rows. Ties among
/// rows are broken by `row_order` (identity when empty), which must not move
/// the mean for height-symmetric policies.
inline MonteCarloResult monte_carlo_oracle(int k, int rows, int max_tier, PlacementModel placement,
                                           RelocationPolicy relocation, std::int64_t trials, std::uint64_t seed,
                                           std::vector<int> row_order = {}) {
  check_dimensions(k, rows, max_tier);
  if (trials < 1) fail(ErrorCode::CapacityExceeded, "trials must be at least 1");
  if (row_order.empty()) {
    row_order.resize(static_cast<std::size_t>(rows));
    std::iota(row_order.begin(), row_order.end(), 0);
  }
  Rng rng(seed);
  std::vector<int> h(static_cast<std::size_t>(rows));
  std::vector<int> open;
  open.reserve(static_cast<std::size_t>(rows));

  // Row for the next container among rows != exclude with room.
  auto choose = [&](bool lowest, bool uniform, int exclude) -> int {
    open.clear();
    for (int r : row_order) {
      if (r != exclude && h[static_cast<std::size_t>(r)] < max_tier) open.push_back(r);
    }
    if (open.empty()) return -1;
    if (uniform) return open[rng.uniform_index(open.size())];
    int best = open.front();
    if (lowest) {
      for (int r : open) {
        if (h[static_cast<std::size_t>(r)] < h[static_cast<std::size_t>(best)]) best = r;
      }
    }
    return best;
  };

  double sum = 0.0, sum_sq = 0.0;
  MonteCarloResult out;
  out.trials = trials;
  const bool uniform_reloc = relocation == RelocationPolicy::UniformOther;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::fill(h.begin(), h.end(), 0);
    for (int n = 0; n < k; ++n) {
      const int r = placement == PlacementModel::UniformNonFull ? choose(false, true, -1) : choose(true, false, -1);
      ++h[static_cast<std::size_t>(r)];
    }
    // Uniform container: index into rows in physical order, bottom up.
    std::uint64_t pick = rng.uniform_index(static_cast<std::uint64_t>(k));
    int stack = 0;
    while (pick >= static_cast<std::uint64_t>(h[static_cast<std::size_t>(stack)])) {
      pick -= static_cast<std::uint64_t>(h[static_cast<std::size_t>(stack)]);
      ++stack;
    }
    const int blockers = h[static_cast<std::size_t>(stack)] - 1 - static_cast<int>(pick);
    if (blockers > 0 && rows == 1) {
      ++out.impossible;
      continue;
    }
    int parked = 0;
    for (int b = 0; b < blockers; ++b) {
      --h[static_cast<std::size_t>(stack)];
      const int target = choose(true, uniform_reloc, stack);
      if (target < 0) {
        ++parked;
      } else {
        ++h[static_cast<std::size_t>(target)];
      }
    }
    --h[static_cast<std::size_t>(stack)];
    for (; parked > 0; --parked) ++h[static_cast<std::size_t>(choose(true, uniform_reloc, -1))];
    sum += blockers;
    sum_sq += static_cast<double>(blockers) * blockers;
  }
  const auto n = static_cast<double>(out.trials - out.impossible);
  if (n > 0) {
    out.mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1)) : 0.0;
    out.standard_error = std::sqrt(var / n);
  }
  return out;
}

struct ReportRow {
  int rows = 0;
  int tiers = 0;
  int k = 0;
  Rational v_k;
  Rational v_to_empty;
  MonteCarloResult mc;
  std::uint64_t seed = 0;
};

/// Analytic and Monte Carlo values for k = 1..kmax. Row k's oracle runs on
/// its own stream derived from `seed`.
inline std::vector<ReportRow> rehandle_report(int rows, int max_tier, int kmax, std::int64_t trials,
                                              std::uint64_t seed,
                                              PlacementModel placement = PlacementModel::UniformNonFull,
                                              RelocationPolicy relocation = RelocationPolicy::LowestOther) {
  check_dimensions(kmax, rows, max_tier);
  std::vector<ReportRow> out;
  for (int k = 1; k <= kmax; ++k) {
    ReportRow row;
    row.rows = rows;
    row.tiers = max_tier;
    row.k = k;
    row.v_k = expected_rehandles(k, rows, max_tier, placement, relocation);
    row.v_to_empty = expected_rehandles_to_empty(k, rows, max_tier, placement, relocation);
    row.mc = monte_carlo_oracle(k, rows, max_tier, placement, relocation, trials,
                                derive_seed(seed, static_cast<std::uint64_t>(k)));
    row.seed = seed;
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string format_decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", x);
  return buf;
}

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "R,T,k,v_k,v_to_empty,mc_mean,mc_se,trials,seed\n";
  for (const ReportRow& r : rows) {
    out << r.rows << ',' << r.tiers << ',' << r.k << ',' << format_decimal(to_double(r.v_k)) << ','
        << format_decimal(to_double(r.v_to_empty)) << ',' << format_decimal(r.mc.mean) << ','
        << format_decimal(r.mc.standard_error) << ',' << r.mc.trials << ',' << r.seed << '\n';
  }
  return out.str();
}

}  // namespace yardtwin::rehandle
