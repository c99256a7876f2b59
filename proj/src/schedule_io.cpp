#include "fusedleo/schedule_io.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>

#include "fusedleo/errors.hpp"

namespace fusedleo {

using nlohmann::json;

json to_json(const Assignment& a) {
  return {{"cell_id", a.cell_id},     {"s", a.signal_index},     {"sv_id", a.sv_id},
          {"beam_id", a.beam_id},     {"channel_id", a.channel_id}, {"t_tx_us", a.t_tx},
          {"t_flight_us", a.flight},  {"t_sweep_us", a.sweep},   {"kind", std::string(to_string(a.kind))}};
}

json to_json(const GnssSchedule& s) {
  json primary = json::array();
  for (const auto& [cell, sv] : s.primary_map) primary.push_back({cell, sv});
  json items = json::array();
  for (const auto& a : s.assignments) items.push_back(to_json(a));
  return {{"period_us", s.period},
          {"n", s.n},
          {"sweep_us", s.sweep_constant},
          {"primary_map", std::move(primary)},
          {"assignments", std::move(items)}};
}

GnssSchedule schedule_from_json(const json& j) {
  try {
    GnssSchedule s;
    s.period = j.at("period_us").get<Micros>();
    s.n = j.at("n").get<int>();
    s.sweep_constant = j.at("sweep_us").get<Micros>();
    for (const auto& p : j.at("primary_map")) s.primary_map[p.at(0).get<int>()] = p.at(1).get<int>();
    for (const auto& item : j.at("assignments")) {
      Assignment a;
      a.cell_id = item.at("cell_id").get<int>();
      a.signal_index = item.at("s").get<int>();
      a.sv_id = item.at("sv_id").get<int>();
      a.beam_id = item.at("beam_id").get<int>();
      a.channel_id = item.at("channel_id").get<int>();
      a.t_tx = item.at("t_tx_us").get<Micros>();
      a.flight = item.at("t_flight_us").get<Micros>();
      a.sweep = item.at("t_sweep_us").get<Micros>();
      const auto kind = item.at("kind").get<std::string>();
      if (kind == "primary")
        a.kind = AssignmentKind::primary;
      else if (kind == "secondary")
        a.kind = AssignmentKind::secondary;
      else
        throw ParseError("unknown assignment kind '" + kind + "'");
      s.assignments.push_back(a);
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("schedule json: ") + e.what());
  }
}

namespace {

constexpr std::array<char, 4> kMagic{'F', 'L', 'G', 'S'};
constexpr std::uint16_t kVersion = 1;

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& in, int bytes, const char* what) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw ParseError(std::string("binary schedule truncated in ") + what);
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

std::uint32_t checked_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > 0xFFFFFFFFLL) throw EncodingError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::size_t packed_payload_bytes(std::size_t count, const BitLayout& layout) {
  return (count * static_cast<std::size_t>(layout.total()) + 7) / 8;
}

void write_schedule_binary(std::ostream& out, const GnssSchedule& s, const BitLayout& layout) {
  BitWriter bits;
  for (const auto& a : s.assignments) bits.put(encode_assignment(a, layout, s.sweep_constant), layout.total());

  out.write(kMagic.data(), kMagic.size());
  put_le(out, kVersion, 2);
  put_le(out, 0, 2);
  put_le(out, checked_u32(s.period, "period"), 4);
  put_le(out, checked_u32(s.sweep_constant, "sweep"), 4);
  put_le(out, checked_u32(s.n, "n"), 4);
  put_le(out, checked_u32(static_cast<std::int64_t>(s.assignments.size()), "count"), 4);
  put_le(out, checked_u32(static_cast<std::int64_t>(s.primary_map.size()), "primary count"), 4);
  for (const auto& [cell, sv] : s.primary_map) {
    put_le(out, checked_u32(cell, "cell id"), 4);
    put_le(out, checked_u32(sv, "sv id"), 4);
  }
  for (const auto& a : s.assignments) {
    put_le(out, checked_u32(a.cell_id, "cell id"), 4);
    if (a.signal_index < 1 || a.signal_index > 255) throw EncodingError("signal index outside 1..255");
    put_le(out, static_cast<std::uint64_t>(a.signal_index), 1);
  }
  out.write(reinterpret_cast<const char*>(bits.bytes().data()), static_cast<std::streamsize>(bits.bytes().size()));
  if (!out) throw IoError("failed writing binary schedule");
}

GnssSchedule read_schedule_binary(std::istream& in, const BitLayout& layout) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4) throw ParseError("binary schedule truncated in header");
  if (magic != kMagic) throw ParseError("not a binary schedule (bad magic)");
  const auto version = get_le(in, 2, "header");
  if (version != kVersion) throw ParseError("unsupported binary schedule version " + std::to_string(version));
  get_le(in, 2, "header");

  GnssSchedule s;
  s.period = static_cast<Micros>(get_le(in, 4, "header"));
  s.sweep_constant = static_cast<Micros>(get_le(in, 4, "header"));
  s.n = static_cast<int>(get_le(in, 4, "header"));
  const auto count = get_le(in, 4, "header");
  const auto n_primary = get_le(in, 4, "header");
  for (std::uint64_t i = 0; i < n_primary; ++i) {
    const int cell = static_cast<int>(get_le(in, 4, "primary map"));
    s.primary_map[cell] = static_cast<int>(get_le(in, 4, "primary map"));
  }
  std::vector<std::pair<int, int>> context;
  context.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const int cell = static_cast<int>(get_le(in, 4, "tuple context"));
    context.emplace_back(cell, static_cast<int>(get_le(in, 1, "tuple context")));
  }
  const std::size_t payload = packed_payload_bytes(static_cast<std::size_t>(count), layout);
  std::vector<std::uint8_t> bytes(payload);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(payload));
  if (static_cast<std::size_t>(in.gcount()) != payload) throw ParseError("binary schedule truncated in payload");
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after binary schedule");

  BitReader reader(bytes.data(), bytes.size());
  s.assignments.reserve(context.size());
  for (const auto& [cell, sig] : context) {
    Assignment a = decode_assignment(reader.get(layout.total()), layout, s.sweep_constant);
    a.cell_id = cell;
    a.signal_index = sig;
    auto primary = s.primary_map.find(cell);
    a.kind = primary != s.primary_map.end() && primary->second == a.sv_id ? AssignmentKind::primary
                                                                           : AssignmentKind::secondary;
    s.assignments.push_back(a);
  }
  return s;
}

}  // namespace fusedleo
