#pragma once

#include <iosfwd>
#include <json.hpp>

#include "fusedleo/codec.hpp"
#include "fusedleo/schedule.hpp"

namespace fusedleo {

nlohmann::json to_json(const Assignment& a);
nlohmann::json to_json(const GnssSchedule& s);
GnssSchedule schedule_from_json(const nlohmann::json& j);

// Packed binary schedule, all integers little-endian:
//
//   "FLGS"  u16 version=1  u16 reserved=0
//   u32 period_us  u32 sweep_us  u32 n  u32 count  u32 n_primary
//   n_primary x (u32 cell, u32 sv)            primary map
//   count x (u32 cell, u8 signal_index)       out-of-band tuple context
//   ceil(count * width / 8) bytes             packed assignment words
//
// Words use the standard BitLayout unless another layout is passed; kind is
// recovered from the primary map.
void write_schedule_binary(std::ostream& out, const GnssSchedule& s, const BitLayout& layout = BitLayout::standard());
GnssSchedule read_schedule_binary(std::istream& in, const BitLayout& layout = BitLayout::standard());

/// Size of the packed assignment words alone, in bytes.
std::size_t packed_payload_bytes(std::size_t count, const BitLayout& layout = BitLayout::standard());

}  // namespace fusedleo
