#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fusedleo/schedule.hpp"

namespace fusedleo {

// Field widths of one packed assignment word. T_sweep is a per-grid constant,
// so the word only carries a flag saying "T_sweep equals the grid constant".
// Cell id, signal index and kind travel out of band.
struct BitLayout {
  int sv_bits = 14;
  int beam_bits = 4;
  int channel_bits = 7;
  int t_tx_bits = 20;
  int flight_bits = 13;
  int sweep_flag_bits = 1;

  int total() const { return sv_bits + beam_bits + channel_bits + t_tx_bits + flight_bits + sweep_flag_bits; }
  void validate() const;

  static BitLayout standard() { return {}; }
};

/// Packs the in-band fields of `a`, LSB first in the order sv, beam, channel,
/// t_tx, T_flight, sweep flag. Throws EncodingError for out-of-range fields or
/// a T_sweep that is neither 0 nor `sweep_constant`.
std::uint64_t encode_assignment(const Assignment& a, const BitLayout& layout, Micros sweep_constant);

/// Inverse of encode_assignment. cell_id, signal_index and kind are left at
/// their defaults; callers restore them from side data.
Assignment decode_assignment(std::uint64_t word, const BitLayout& layout, Micros sweep_constant);

// Appends fixed-width words to a little-endian bitstream (bit 0 of byte 0
// first).
class BitWriter {
 public:
  void put(std::uint64_t value, int bits);
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::size_t bit_count() const { return bits_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  std::uint64_t get(int bits);
  std::size_t remaining_bits() const { return size_ * 8 - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace fusedleo
