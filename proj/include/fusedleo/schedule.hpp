#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace fusedleo {

// Schedule times are integer microseconds; the time quantum is fixed at 1 us.
using Micros = std::int64_t;

struct TimingParams {
  Micros burst = 500;
  Micros switch_tx = 100;
  Micros switch_rx = 100;
  Micros setup_tx = 5'000;
  Micros setup_rx = 5'000;
  Micros period = 1'000'000;
  int n = 5;  // ranging signals per cell per period

  static constexpr Micros quantum = 1;

  // Strict invariants needed by the schedulers and the checker.
  void validate() const;
};

enum class AssignmentKind : std::uint8_t { primary, secondary };
std::string_view to_string(AssignmentKind k);

struct Assignment {
  int cell_id = 0;
  int signal_index = 1;  // 1..n
  int sv_id = 0;
  int beam_id = 0;
  int channel_id = 0;
  Micros t_tx = 0;    // departure time modulo the period
  Micros flight = 0;  // T_flight
  Micros sweep = 0;   // T_sweep
  AssignmentKind kind = AssignmentKind::secondary;

  Micros arrival(Micros period) const { return (t_tx + flight) % period; }
  bool operator==(const Assignment&) const = default;
};

struct GnssSchedule {
  Micros period = 1'000'000;
  int n = 5;
  Micros sweep_constant = 0;          // grid-wide T_sweep
  std::map<int, int> primary_map;     // cell -> primary SV
  std::vector<Assignment> assignments;

  bool operator==(const GnssSchedule&) const = default;
};

// Which channels each beam of an SV may transmit on. The n_bc beam-channels
// are spread over the beams as evenly as possible (lower-index beams get the
// smaller share); beam b owns a contiguous block of channels starting at
// floor(b * n_channels / n_beams), wrapping modulo n_channels.
class BeamChannelLayout {
 public:
  BeamChannelLayout(int n_beams, int n_channels, int n_bc);

  int n_beams() const { return n_beams_; }
  int n_channels() const { return n_channels_; }
  int n_bc() const { return n_bc_; }
  int slots(int beam) const;
  std::span<const int> channels(int beam) const;
  bool contains(int beam, int channel) const;

 private:
  int n_beams_, n_channels_, n_bc_;
  std::vector<std::vector<int>> channels_;
  std::vector<std::vector<bool>> member_;
};

}  // namespace fusedleo
