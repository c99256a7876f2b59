#include "fusedleo/codec.hpp"

#include <string>

#include "fusedleo/errors.hpp"

namespace fusedleo {

void BitLayout::validate() const {
  for (int w : {sv_bits, beam_bits, channel_bits, t_tx_bits, flight_bits, sweep_flag_bits})
    if (w < 0 || w > 32) throw ParameterError("bit layout: field widths must lie in [0, 32]");
  if (total() > 64) throw ParameterError("bit layout: more than 64 bits");
}

namespace {

std::uint64_t field(std::int64_t value, int bits, const char* name) {
  if (value < 0 || (bits < 63 && value >= (std::int64_t{1} << bits)))
    throw EncodingError(std::string(name) + " = " + std::to_string(value) + " does not fit in " +
                        std::to_string(bits) + " bits");
  return static_cast<std::uint64_t>(value);
}

}  // namespace

std::uint64_t encode_assignment(const Assignment& a, const BitLayout& layout, Micros sweep_constant) {
  layout.validate();
  std::int64_t flag = 0;
  if (a.sweep == sweep_constant && sweep_constant != 0)
    flag = 1;
  else if (a.sweep != 0)
    throw EncodingError("T_sweep = " + std::to_string(a.sweep) + " is neither 0 nor the grid constant " +
                        std::to_string(sweep_constant));
  std::uint64_t word = 0;
  int shift = 0;
  auto put = [&](std::int64_t v, int bits, const char* name) {
    word |= field(v, bits, name) << shift;
    shift += bits;
  };
  put(a.sv_id, layout.sv_bits, "sv_id");
  put(a.beam_id, layout.beam_bits, "beam_id");
  put(a.channel_id, layout.channel_bits, "channel_id");
  put(a.t_tx, layout.t_tx_bits, "t_tx");
  put(a.flight, layout.flight_bits, "T_flight");
  put(flag, layout.sweep_flag_bits, "T_sweep flag");
  return word;
}

Assignment decode_assignment(std::uint64_t word, const BitLayout& layout, Micros sweep_constant) {
  layout.validate();
  if (layout.total() < 64 && (word >> layout.total()) != 0)
    throw EncodingError("word has bits set above the layout width");
  int shift = 0;
  auto take = [&](int bits) {
    const std::uint64_t mask = bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    const std::uint64_t v = (word >> shift) & mask;
    shift += bits;
    return static_cast<std::int64_t>(v);
  };
  Assignment a;
  a.sv_id = static_cast<int>(take(layout.sv_bits));
  a.beam_id = static_cast<int>(take(layout.beam_bits));
  a.channel_id = static_cast<int>(take(layout.channel_bits));
  a.t_tx = take(layout.t_tx_bits);
  a.flight = take(layout.flight_bits);
  a.sweep = take(layout.sweep_flag_bits) ? sweep_constant : 0;
  return a;
}

void BitWriter::put(std::uint64_t value, int bits) {
  for (int i = 0; i < bits; ++i, ++bits_) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if ((value >> i) & 1U) bytes_.back() |= static_cast<std::uint8_t>(1U << (bits_ % 8));
  }
}

std::uint64_t BitReader::get(int bits) {
  if (static_cast<std::size_t>(bits) > remaining_bits()) throw ParseError("bitstream truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bits; ++i, ++pos_)
    if ((data_[pos_ / 8] >> (pos_ % 8)) & 1U) v |= std::uint64_t{1} << i;
  return v;
}

}  // namespace fusedleo
