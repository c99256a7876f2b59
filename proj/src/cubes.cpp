#include "fusedleo/cubes.hpp"

#include <algorithm>

#include "fusedleo/errors.hpp"

namespace fusedleo {

std::vector<std::pair<Micros, Micros>> wrap_pieces(Micros begin, Micros length, Micros period) {
  if (length <= 0 || length > period) throw ParameterError("interval length must be in (0, period]");
  const Micros b = ((begin % period) + period) % period;
  if (b + length <= period) return {{b, b + length}};
  return {{b, period}, {0, b + length - period}};
}

void IntervalList::insert(const Interval& iv) {
  auto it = std::upper_bound(items_.begin(), items_.end(), iv.begin,
                             [](Micros v, const Interval& a) { return v < a.begin; });
  items_.insert(it, iv);
  max_length_ = std::max(max_length_, iv.length());
}

bool IntervalList::erase(const Interval& iv) {
  auto it = std::lower_bound(items_.begin(), items_.end(), iv.begin,
                             [](const Interval& a, Micros v) { return a.begin < v; });
  for (; it != items_.end() && it->begin == iv.begin; ++it) {
    if (*it == iv) {
      items_.erase(it);
      return true;
    }
  }
  return false;
}

Micros IntervalList::total_length() const {
  Micros total = 0;
  for (const auto& iv : items_) total += iv.length();
  return total;
}

Micros union_length(std::vector<std::pair<Micros, Micros>> pieces) {
  std::sort(pieces.begin(), pieces.end());
  Micros total = 0, cur_b = 0, cur_e = 0;
  bool open = false;
  for (const auto& [b, e] : pieces) {
    if (!open || b > cur_e) {
      if (open) total += cur_e - cur_b;
      cur_b = b;
      cur_e = e;
      open = true;
    } else {
      cur_e = std::max(cur_e, e);
    }
  }
  if (open) total += cur_e - cur_b;
  return total;
}

namespace {

Interval make_interval(std::pair<Micros, Micros> piece, int owner, int channel, SlotStatus status) {
  return {static_cast<std::int32_t>(piece.first), static_cast<std::int32_t>(piece.second), owner,
          static_cast<std::int16_t>(channel), status};
}

Conflict conflict_for(const Interval& blocking, Micros piece_begin) {
  return {blocking, std::max<Micros>(1, blocking.end - piece_begin)};
}

bool pieces_overlap(const std::vector<std::pair<Micros, Micros>>& a, const std::vector<std::pair<Micros, Micros>>& b,
                    Micros* a_begin, Micros* b_end) {
  for (const auto& pa : a)
    for (const auto& pb : b)
      if (pa.first < pb.second && pb.first < pa.second) {
        *a_begin = pa.first;
        *b_end = pb.second;
        return true;
      }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

TxCube::TxCube(Micros period, BeamChannelLayout layout, int n_sats)
    : period_(period), layout_(std::move(layout)), n_sats_(n_sats) {
  if (period <= 0 || period > INT32_MAX) throw ParameterError("tx cube: period out of range");
}

void TxCube::check(const TxRequest& r) const {
  if (r.key.sv < 0 || r.key.sv >= n_sats_) throw ParameterError("tx cube: sv id out of range");
  if (r.key.beam < 0 || r.key.beam >= layout_.n_beams()) throw ParameterError("tx cube: beam id out of range");
  if (r.key.channel != TxKey::kWholeBeam && !layout_.contains(r.key.beam, r.key.channel))
    throw ParameterError("tx cube: channel " + std::to_string(r.key.channel) + " is not carried by beam " +
                         std::to_string(r.key.beam));
}

std::optional<Conflict> TxCube::probe(std::span<const TxRequest> requests, std::span<const TxGuard> guards) const {
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const TxRequest& r = requests[i];
    check(r);
    const auto pieces = wrap_pieces(r.begin, r.length, period_);
    auto found = beams_.find(beam_key(r.key.sv, r.key.beam));
    if (found != beams_.end()) {
      const BeamTimeline& t = found->second;
      for (const auto& pc : pieces) {
        if (const Interval* hit = t.whole.find_overlap(pc.first, pc.second, [](const Interval&) { return true; }))
          return conflict_for(*hit, pc.first);
        const int ch = r.key.channel;
        if (const Interval* hit = t.channel.find_overlap(
                pc.first, pc.second, [ch](const Interval& iv) { return ch == TxKey::kWholeBeam || iv.channel == ch; }))
          return conflict_for(*hit, pc.first);
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      const TxRequest& o = requests[j];
      if (o.key.sv != r.key.sv || o.key.beam != r.key.beam) continue;
      if (o.key.channel != r.key.channel && o.key.channel != TxKey::kWholeBeam && r.key.channel != TxKey::kWholeBeam)
        continue;
      Micros pb = 0, oe = 0;
      if (pieces_overlap(pieces, wrap_pieces(o.begin, o.length, period_), &pb, &oe)) {
        Interval blocking{0, static_cast<std::int32_t>(oe), o.owner_cell, static_cast<std::int16_t>(o.key.channel), o.status};
        return conflict_for(blocking, pb);
      }
    }
  }
  for (const TxGuard& g : guards) {
    auto found = beams_.find(beam_key(g.sv, g.beam));
    if (found == beams_.end()) continue;
    const int owner = g.owner_cell;
    auto other = [owner](const Interval& iv) { return iv.owner != owner; };
    for (const auto& pc : wrap_pieces(g.begin, g.length, period_)) {
      if (const Interval* hit = found->second.channel.find_overlap(pc.first, pc.second, other))
        return conflict_for(*hit, pc.first);
      if (const Interval* hit = found->second.whole.find_overlap(pc.first, pc.second, other))
        return conflict_for(*hit, pc.first);
    }
  }
  return std::nullopt;
}

std::optional<Conflict> TxCube::reserve(std::span<const TxRequest> requests, std::span<const TxGuard> guards) {
  if (auto c = probe(requests, guards)) return c;
  for (const TxRequest& r : requests) {
    BeamTimeline& t = beams_[beam_key(r.key.sv, r.key.beam)];
    for (const auto& pc : wrap_pieces(r.begin, r.length, period_)) {
      const Interval iv = make_interval(pc, r.owner_cell, r.key.channel, r.status);
      (r.key.channel == TxKey::kWholeBeam ? t.whole : t.channel).insert(iv);
    }
  }
  return std::nullopt;
}

void TxCube::release(std::span<const TxRequest> requests) {
  for (const TxRequest& r : requests) {
    auto found = beams_.find(beam_key(r.key.sv, r.key.beam));
    if (found == beams_.end()) continue;
    for (const auto& pc : wrap_pieces(r.begin, r.length, period_)) {
      const Interval iv = make_interval(pc, r.owner_cell, r.key.channel, r.status);
      (r.key.channel == TxKey::kWholeBeam ? found->second.whole : found->second.channel).erase(iv);
    }
  }
}

double TxCube::reserved_time() const {
  Micros whole = 0, channel = 0;
  for (const auto& [k, t] : beams_) {
    whole += t.whole.total_length();
    channel += t.channel.total_length();
  }
  return static_cast<double>(whole) * layout_.n_bc() / layout_.n_beams() + static_cast<double>(channel);
}

double TxCube::occupancy() const {
  Micros whole = 0, channel = 0;
  for (const auto& [k, t] : beams_) {
    whole += t.whole.total_length();
    channel += t.channel.total_length();
  }
  // Integer numerator over an integer denominator, both exact in double.
  const double num = static_cast<double>(whole * layout_.n_bc() + channel * layout_.n_beams());
  const double den = static_cast<double>(layout_.n_beams()) * layout_.n_bc() * n_sats_ * static_cast<double>(period_);
  return num / den;
}

bool TxCube::empty() const {
  return std::all_of(beams_.begin(), beams_.end(),
                     [](const auto& kv) { return kv.second.whole.empty() && kv.second.channel.empty(); });
}

std::optional<Conflict> tx_reserve(TxCube& cube, const TxRequest& request) {
  return cube.reserve(std::span<const TxRequest>(&request, 1));
}

TxPlan tx_plan(const Assignment& a, const TimingParams& timing) {
  TxPlan plan;
  if (a.kind == AssignmentKind::primary) {
    plan.requests.push_back({{a.sv_id, a.beam_id, a.channel_id}, a.t_tx, timing.burst, SlotStatus::burst, a.cell_id});
    plan.guards.push_back({a.sv_id, a.beam_id, a.t_tx - timing.switch_tx, timing.burst + 2 * timing.switch_tx, a.cell_id});
  } else {
    const TxKey beam{a.sv_id, a.beam_id, TxKey::kWholeBeam};
    plan.requests.push_back({beam, a.t_tx - timing.switch_tx, timing.switch_tx, SlotStatus::switching, a.cell_id});
    plan.requests.push_back({beam, a.t_tx, timing.burst, SlotStatus::burst, a.cell_id});
    plan.requests.push_back({beam, a.t_tx + timing.burst, timing.switch_tx, SlotStatus::switching, a.cell_id});
  }
  return plan;
}

// ---------------------------------------------------------------------------

RxCube::RxCube(Micros period, int n_cells, int n_channels)
    : period_(period), n_cells_(n_cells), n_channels_(n_channels) {
  if (period <= 0 || period > INT32_MAX) throw ParameterError("rx cube: period out of range");
}

namespace {

// Whether a new interval of status `incoming` may overlap an existing one.
// Switching margins only guard against a different SV: a terminal staying on
// the same SV does not re-point.
bool rx_compatible(SlotStatus incoming, SlotStatus existing, bool same_sv) {
  if (incoming == SlotStatus::exclude) return existing != SlotStatus::burst;
  if (existing == SlotStatus::exclude) return incoming != SlotStatus::burst;
  if (same_sv) return incoming == SlotStatus::switching || existing == SlotStatus::switching;
  return false;
}

}  // namespace

std::optional<Conflict> RxCube::probe(std::span<const RxRequest> requests) const {
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const RxRequest& r = requests[i];
    if (r.cell < 0 || r.cell >= n_cells_ || r.channel < 0 || r.channel >= n_channels_)
      throw ParameterError("rx cube: cell or channel out of range");
    const auto pieces = wrap_pieces(r.begin, r.length, period_);
    auto found = keys_.find(key(r.cell, r.channel));
    if (found != keys_.end()) {
      const auto status = r.status;
      const int sv = r.owner_sv;
      auto blocks = [status, sv](const Interval& iv) { return !rx_compatible(status, iv.status, iv.owner == sv); };
      for (const auto& pc : pieces) {
        if (const Interval* hit = found->second.hard.find_overlap(pc.first, pc.second, blocks))
          return conflict_for(*hit, pc.first);
        if (const Interval* hit = found->second.exclude.find_overlap(pc.first, pc.second, blocks))
          return conflict_for(*hit, pc.first);
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      const RxRequest& o = requests[j];
      if (o.cell != r.cell || o.channel != r.channel) continue;
      if (rx_compatible(r.status, o.status, r.owner_sv == o.owner_sv)) continue;
      Micros pb = 0, oe = 0;
      if (pieces_overlap(pieces, wrap_pieces(o.begin, o.length, period_), &pb, &oe)) {
        Interval blocking{0, static_cast<std::int32_t>(oe), o.owner_sv, static_cast<std::int16_t>(o.channel), o.status};
        return conflict_for(blocking, pb);
      }
    }
  }
  return std::nullopt;
}

std::optional<Conflict> RxCube::reserve(std::span<const RxRequest> requests) {
  if (auto c = probe(requests)) return c;
  for (const RxRequest& r : requests) {
    KeyTimeline& t = keys_[key(r.cell, r.channel)];
    for (const auto& pc : wrap_pieces(r.begin, r.length, period_)) {
      const Interval iv = make_interval(pc, r.owner_sv, r.channel, r.status);
      (r.status == SlotStatus::exclude ? t.exclude : t.hard).insert(iv);
    }
  }
  return std::nullopt;
}

void RxCube::release(std::span<const RxRequest> requests) {
  for (const RxRequest& r : requests) {
    auto found = keys_.find(key(r.cell, r.channel));
    if (found == keys_.end()) continue;
    for (const auto& pc : wrap_pieces(r.begin, r.length, period_)) {
      const Interval iv = make_interval(pc, r.owner_sv, r.channel, r.status);
      (r.status == SlotStatus::exclude ? found->second.exclude : found->second.hard).erase(iv);
    }
  }
}

Micros RxCube::reserved_time() const {
  Micros total = 0;
  std::vector<std::pair<Micros, Micros>> pieces;
  for (const auto& [k, t] : keys_) {
    pieces.clear();
    for (const auto& iv : t.hard.items()) pieces.emplace_back(iv.begin, iv.end);
    for (const auto& iv : t.exclude.items()) pieces.emplace_back(iv.begin, iv.end);
    total += union_length(pieces);
  }
  return total;
}

double RxCube::occupancy() const {
  const double volume = static_cast<double>(n_cells_) * n_channels_ * static_cast<double>(period_);
  return static_cast<double>(reserved_time()) / volume;
}

bool RxCube::empty() const {
  return std::all_of(keys_.begin(), keys_.end(),
                     [](const auto& kv) { return kv.second.hard.empty() && kv.second.exclude.empty(); });
}

std::vector<Interval> RxCube::intervals(int cell, int channel) const {
  std::vector<Interval> out;
  auto found = keys_.find(key(cell, channel));
  if (found == keys_.end()) return out;
  for (const auto& iv : found->second.hard.items()) out.push_back(iv);
  for (const auto& iv : found->second.exclude.items()) out.push_back(iv);
  return out;
}

std::vector<RxRequest> rx_requests(const CellGrid& grid, const Assignment& a, const TimingParams& timing) {
  std::vector<RxRequest> out;
  const Micros arrival = a.arrival(timing.period);
  const Micros window = timing.burst + a.sweep;
  out.push_back({a.cell_id, a.channel_id, arrival, window, SlotStatus::burst, a.sv_id});
  if (a.kind == AssignmentKind::secondary) {
    out.push_back({a.cell_id, a.channel_id, arrival - timing.switch_rx, timing.switch_rx, SlotStatus::switching, a.sv_id});
    out.push_back({a.cell_id, a.channel_id, arrival + window, timing.switch_rx, SlotStatus::switching, a.sv_id});
  }
  for (int nb : grid.cell(a.cell_id).neighbor_ids)
    out.push_back({nb, a.channel_id, arrival, window, SlotStatus::exclude, a.sv_id});
  return out;
}

std::optional<Conflict> rx_reserve(RxCube& cube, const CellGrid& grid, const Assignment& a, const TimingParams& timing) {
  const auto requests = rx_requests(grid, a, timing);
  return cube.reserve(requests);
}

// ---------------------------------------------------------------------------

std::optional<Conflict> SetupTimeline::probe(std::int64_t key, Micros begin, Micros length) const {
  auto found = lists_.find(key);
  if (found == lists_.end()) return std::nullopt;
  for (const auto& pc : wrap_pieces(begin, length, period_))
    if (const Interval* hit = found->second.find_overlap(pc.first, pc.second, [](const Interval&) { return true; }))
      return conflict_for(*hit, pc.first);
  return std::nullopt;
}

std::optional<Conflict> SetupTimeline::reserve(std::int64_t key, Micros begin, Micros length, int owner) {
  if (auto c = probe(key, begin, length)) return c;
  IntervalList& list = lists_[key];
  for (const auto& pc : wrap_pieces(begin, length, period_)) list.insert(make_interval(pc, owner, -1, SlotStatus::setup));
  return std::nullopt;
}

void SetupTimeline::release(std::int64_t key, Micros begin, Micros length, int owner) {
  auto found = lists_.find(key);
  if (found == lists_.end()) return;
  for (const auto& pc : wrap_pieces(begin, length, period_))
    found->second.erase(make_interval(pc, owner, -1, SlotStatus::setup));
}

Micros SetupTimeline::total_length() const {
  Micros total = 0;
  for (const auto& [k, list] : lists_) total += list.total_length();
  return total;
}

bool SetupTimeline::empty() const {
  return std::all_of(lists_.begin(), lists_.end(), [](const auto& kv) { return kv.second.empty(); });
}

}  // namespace fusedleo
