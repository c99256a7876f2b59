#pragma once

#include <array>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "fusedleo/constellation.hpp"
#include "fusedleo/geo_cells.hpp"
#include "fusedleo/schedule.hpp"

namespace fusedleo {

// Constraint numbers 1..8 follow the scheduling constraints; the two extra
// checks are numbered after them.
inline constexpr int kVisibilityConstraint = 9;
inline constexpr int kConsistencyConstraint = 10;

struct Violation {
  int constraint = 0;
  std::string detail;
  std::vector<int> cells;
  std::vector<int> svs;
  std::vector<Micros> times;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  std::array<int, kConsistencyConstraint + 1> counts{};  // index = constraint number
  std::size_t assignments_checked = 0;

  bool feasible() const { return violations.empty(); }
  int count(int constraint) const { return counts.at(static_cast<std::size_t>(constraint)); }
};

nlohmann::json to_json(const FeasibilityReport& r);

/// Independent oracle. Rebuilds the TX and RX timelines directly from the
/// tuples (no reservation cubes) and reports every violated constraint.
/// `states` must hold the SV states of the schedule's epoch, indexed by sv id.
FeasibilityReport check_feasibility(const GnssSchedule& schedule, const CellGrid& grid,
                                    std::span<const SvState> states, const ConstellationConfig& config,
                                    const TimingParams& timing, double geo_mask_halfwidth_deg = 5.0);

/// Integer T_flight for a tuple: whole microseconds, rounded down.
Micros quantize_flight(double seconds);

/// Integer T_sweep for a grid: whole microseconds, rounded up.
Micros quantize_sweep(double seconds);

}  // namespace fusedleo
