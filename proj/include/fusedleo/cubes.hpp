#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fusedleo/geo_cells.hpp"
#include "fusedleo/schedule.hpp"

namespace fusedleo {

enum class SlotStatus : std::uint8_t { burst, switching, exclude, setup };

// Half-open [begin, end) inside one period.
struct Interval {
  std::int32_t begin = 0;
  std::int32_t end = 0;
  std::int32_t owner = -1;    // cell id (TX, setup) or SV id (RX)
  std::int16_t channel = -1;  // channel tag where the list mixes channels
  SlotStatus status = SlotStatus::burst;

  Micros length() const { return end - begin; }
  bool operator==(const Interval&) const = default;
};

// A rejected reservation. `shift` is how far the whole request would have to
// move forward in time to clear `blocking`.
struct Conflict {
  Interval blocking;
  Micros shift = 1;
};

/// Splits [begin, begin+length) modulo `period` into at most two pieces.
std::vector<std::pair<Micros, Micros>> wrap_pieces(Micros begin, Micros length, Micros period);

// Intervals sorted by begin. Overlaps are allowed at this level; the cubes
// decide what may coexist.
class IntervalList {
 public:
  template <class Pred>
  const Interval* find_overlap(Micros begin, Micros end, Pred&& pred) const;

  void insert(const Interval& iv);
  bool erase(const Interval& iv);

  std::span<const Interval> items() const { return items_; }
  bool empty() const { return items_.empty(); }
  Micros total_length() const;

 private:
  std::vector<Interval> items_;
  Micros max_length_ = 0;
};

template <class Pred>
const Interval* IntervalList::find_overlap(Micros begin, Micros end, Pred&& pred) const {
  const Micros from = begin - max_length_;
  auto it = std::lower_bound(items_.begin(), items_.end(), from,
                             [](const Interval& a, Micros v) { return a.begin < v; });
  for (; it != items_.end() && it->begin < end; ++it)
    if (it->end > begin && pred(*it)) return &*it;
  return nullptr;
}

/// Length of the union of the given intervals.
Micros union_length(std::vector<std::pair<Micros, Micros>> pieces);

// ---------------------------------------------------------------------------
// TX cube: (sv, beam, channel) x time. Whole-beam reservations (secondary
// bursts steer the entire beam away) are stored once per beam and block every
// channel of that beam.

struct TxKey {
  static constexpr int kWholeBeam = -1;
  int sv = 0;
  int beam = 0;
  int channel = kWholeBeam;
};

struct TxRequest {
  TxKey key;
  Micros begin = 0;
  Micros length = 0;
  SlotStatus status = SlotStatus::burst;
  int owner_cell = -1;
};

// Read-only requirement: no interval owned by another cell may touch this
// window on the beam.
struct TxGuard {
  int sv = 0;
  int beam = 0;
  Micros begin = 0;
  Micros length = 0;
  int owner_cell = -1;
};

class TxCube {
 public:
  TxCube(Micros period, BeamChannelLayout layout, int n_sats);

  /// Atomic: either every request is recorded or none is.
  std::optional<Conflict> reserve(std::span<const TxRequest> requests, std::span<const TxGuard> guards = {});
  std::optional<Conflict> probe(std::span<const TxRequest> requests, std::span<const TxGuard> guards = {}) const;
  void release(std::span<const TxRequest> requests);

  /// Non-idle beam-channel time. A whole-beam interval counts once per mean
  /// beam width N_bc / N_beams, since beam-channels are shared out across
  /// beams and 264 / 15 is not integral.
  double reserved_time() const;
  double occupancy() const;
  bool empty() const;

  Micros period() const { return period_; }
  const BeamChannelLayout& layout() const { return layout_; }
  int n_sats() const { return n_sats_; }

 private:
  struct BeamTimeline {
    IntervalList whole;
    IntervalList channel;
  };
  std::int64_t beam_key(int sv, int beam) const { return static_cast<std::int64_t>(sv) * layout_.n_beams() + beam; }
  void check(const TxRequest& r) const;

  Micros period_;
  BeamChannelLayout layout_;
  int n_sats_;
  std::unordered_map<std::int64_t, BeamTimeline> beams_;
};

// ---------------------------------------------------------------------------
// RX cube: (cell, channel) x time in the arrival frame. Exclude intervals may
// overlap one another and switching margins; bursts overlap nothing.

struct RxRequest {
  int cell = 0;
  int channel = 0;
  Micros begin = 0;
  Micros length = 0;
  SlotStatus status = SlotStatus::burst;
  int owner_sv = -1;
};

class RxCube {
 public:
  RxCube(Micros period, int n_cells, int n_channels);

  std::optional<Conflict> reserve(std::span<const RxRequest> requests);
  std::optional<Conflict> probe(std::span<const RxRequest> requests) const;
  void release(std::span<const RxRequest> requests);

  Micros reserved_time() const;  // union per key
  double occupancy() const;
  bool empty() const;

  Micros period() const { return period_; }

  /// Intervals on one (cell, channel), burst/switch first then exclusions.
  std::vector<Interval> intervals(int cell, int channel) const;

 private:
  struct KeyTimeline {
    IntervalList hard;     // burst, switching
    IntervalList exclude;  // exclusions from neighbor bursts
  };
  std::int64_t key(int cell, int channel) const { return static_cast<std::int64_t>(cell) * n_channels_ + channel; }

  Micros period_;
  int n_cells_;
  int n_channels_;
  std::unordered_map<std::int64_t, KeyTimeline> keys_;
};

/// Requests an assignment places in the RX cube: the burst window
/// (T_burst + T_sweep from arrival), switching margins for secondary
/// assignments, and exclusions on every neighbor cell on the same channel.
std::vector<RxRequest> rx_requests(const CellGrid& grid, const Assignment& a, const TimingParams& timing);

std::optional<Conflict> rx_reserve(RxCube& cube, const CellGrid& grid, const Assignment& a, const TimingParams& timing);

/// TX requests and guards for one assignment: a single beam-channel burst for
/// primary assignments, the whole beam for T_burst + 2 T_switch for secondary.
struct TxPlan {
  std::vector<TxRequest> requests;
  std::vector<TxGuard> guards;
};
TxPlan tx_plan(const Assignment& a, const TimingParams& timing);

std::optional<Conflict> tx_reserve(TxCube& cube, const TxRequest& request);

// ---------------------------------------------------------------------------
// Coefficient set-up windows, one timeline per array (SV beam for TX, cell
// for RX). Windows on one timeline are pairwise disjoint.

class SetupTimeline {
 public:
  explicit SetupTimeline(Micros period) : period_(period) {}

  std::optional<Conflict> reserve(std::int64_t key, Micros begin, Micros length, int owner);
  std::optional<Conflict> probe(std::int64_t key, Micros begin, Micros length) const;
  void release(std::int64_t key, Micros begin, Micros length, int owner);

  Micros total_length() const;
  bool empty() const;

 private:
  Micros period_;
  std::unordered_map<std::int64_t, IntervalList> lists_;
};

}  // namespace fusedleo
