#pragma once

#include <cstdint>
#include <json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusedleo/constellation.hpp"
#include "fusedleo/cubes.hpp"
#include "fusedleo/geo_cells.hpp"
#include "fusedleo/schedule.hpp"

namespace fusedleo {

enum class SchedulerMode { greedy, randomized };
enum class CellOrder { id, random, geo };

std::string_view to_string(SchedulerMode m);
std::string_view to_string(CellOrder o);
SchedulerMode parse_scheduler_mode(std::string_view s);
CellOrder parse_cell_order(std::string_view s);

struct SchedulerConfig {
  SchedulerMode mode = SchedulerMode::greedy;
  std::uint64_t rng_seed = 1;
  int max_attempts_per_signal = 10'000;
  double epoch_s = 0.0;
  CellOrder order = CellOrder::id;
  VisibilityOptions visibility;

  void validate() const;
};

struct CellFailure {
  int cell_id = 0;
  std::string reason;
};

struct ScheduleStats {
  std::int64_t total_steps = 0;  // candidate (SV, beam, channel, time) tuples examined
  std::int64_t conflicts_tx = 0;
  std::int64_t conflicts_rx = 0;
  std::vector<CellFailure> cells_failed;
  double wall_time_s = 0.0;

  bool complete() const { return cells_failed.empty(); }
};

// wall_time_s is left out so reruns produce identical files.
nlohmann::json to_json(const ScheduleStats& s);

// A schedule together with the reservation state that produced it.
struct ScheduleResult {
  GnssSchedule schedule;
  ScheduleStats stats;
  TxCube tx;
  RxCube rx;
  SetupTimeline tx_setup;  // keyed by sv * n_beams + beam
  SetupTimeline rx_setup;  // keyed by cell
};

/// Order in which cells are visited. `geo` sweeps meridian strips one cell
/// wide from west to east, alternating south-north direction per strip.
std::vector<int> cell_order(const CellGrid& grid, CellOrder order, std::uint64_t seed);

/// Greedy goal-direction scheduler over SV states at the scheduling epoch
/// (indexed by sv id). Signal 1 always goes to the cell's primary SV, the
/// zenith-most usable one; signals 2..n walk the remaining SVs in goal
/// alignment order, trying beams from the lowest index and scanning time
/// earliest-fit from a per-cell offset.
ScheduleResult greedy_schedule(const CellGrid& grid, const ConstellationConfig& config,
                               std::span<const SvState> states, const TimingParams& timing,
                               const SchedulerConfig& sched);

/// Rejection sampling: each step draws (SV, beam, channel, time) uniformly
/// and keeps it if every reservation succeeds.
ScheduleResult randomized_schedule(const CellGrid& grid, const ConstellationConfig& config,
                                   std::span<const SvState> states, const TimingParams& timing,
                                   const SchedulerConfig& sched);

/// Dispatches on sched.mode after propagating the constellation to
/// sched.epoch_s.
ScheduleResult run_scheduler(const CellGrid& grid, const ConstellationConfig& config, const TimingParams& timing,
                             const SchedulerConfig& sched);

/// Expected sampling steps n·N_cells / (1 − 2R_TX − 2R_RX).
double complexity_bound(int n, double n_cells, double r_tx, double r_rx);

/// SplitMix64 finalizer, used for per-cell offsets.
std::uint64_t mix64(std::uint64_t x);

}  // namespace fusedleo
