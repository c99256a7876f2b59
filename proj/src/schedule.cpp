#include "fusedleo/schedule.hpp"

#include <algorithm>

#include "fusedleo/errors.hpp"

namespace fusedleo {

void TimingParams::validate() const {
  if (burst <= 0 || switch_tx <= 0 || switch_rx <= 0 || setup_tx <= 0 || setup_rx <= 0 || period <= 0)
    throw ParameterError("timing: all durations must be > 0");
  if (burst + 2 * switch_tx >= period) throw ParameterError("timing: burst + 2*switch_tx must be < period");
  // n = 0 switches the fused service off entirely.
  if (n != 0 && n < 4) throw ParameterError("timing: n must be 0 or >= 4");
}

std::string_view to_string(AssignmentKind k) { return k == AssignmentKind::primary ? "primary" : "secondary"; }

BeamChannelLayout::BeamChannelLayout(int n_beams, int n_channels, int n_bc)
    : n_beams_(n_beams), n_channels_(n_channels), n_bc_(n_bc) {
  if (n_beams < 1 || n_channels < 1) throw ParameterError("layout: n_beams and n_channels must be >= 1");
  if (n_bc < n_beams || n_bc > n_beams * n_channels)
    throw ParameterError("layout: n_bc must lie in [n_beams, n_beams * n_channels]");
  const int base = n_bc / n_beams;
  const int extra = n_bc % n_beams;
  channels_.resize(static_cast<std::size_t>(n_beams));
  member_.assign(static_cast<std::size_t>(n_beams), std::vector<bool>(static_cast<std::size_t>(n_channels), false));
  for (int b = 0; b < n_beams; ++b) {
    const int count = base + (b >= n_beams - extra ? 1 : 0);
    const int start = static_cast<int>(static_cast<long long>(b) * n_channels / n_beams);
    for (int k = 0; k < count; ++k) {
      const int ch = (start + k) % n_channels;
      channels_[static_cast<std::size_t>(b)].push_back(ch);
      member_[static_cast<std::size_t>(b)][static_cast<std::size_t>(ch)] = true;
    }
    std::sort(channels_[static_cast<std::size_t>(b)].begin(), channels_[static_cast<std::size_t>(b)].end());
  }
}

int BeamChannelLayout::slots(int beam) const { return static_cast<int>(channels_.at(static_cast<std::size_t>(beam)).size()); }

std::span<const int> BeamChannelLayout::channels(int beam) const { return channels_.at(static_cast<std::size_t>(beam)); }

bool BeamChannelLayout::contains(int beam, int channel) const {
  if (beam < 0 || beam >= n_beams_ || channel < 0 || channel >= n_channels_) return false;
  return member_[static_cast<std::size_t>(beam)][static_cast<std::size_t>(channel)];
}

}  // namespace fusedleo
