#include "fusedleo/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "fusedleo/errors.hpp"

namespace fusedleo {

Micros quantize_flight(double seconds) { return static_cast<Micros>(std::floor(seconds * 1e6 + 1e-6)); }

Micros quantize_sweep(double seconds) { return static_cast<Micros>(std::ceil(seconds * 1e6 - 1e-6)); }

nlohmann::json to_json(const FeasibilityReport& r) {
  nlohmann::json by = nlohmann::json::object();
  for (int c = 1; c <= kConsistencyConstraint; ++c) by[std::to_string(c)] = r.count(c);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : r.violations)
    list.push_back({{"constraint", v.constraint}, {"detail", v.detail}, {"cells", v.cells}, {"svs", v.svs},
                    {"times_us", v.times}});
  return {{"feasible", r.feasible()},
          {"assignments_checked", r.assignments_checked},
          {"violation_count", r.violations.size()},
          {"by_constraint", std::move(by)},
          {"violations", std::move(list)}};
}

namespace {

// One microsecond-resolution timeline over a period, holding the index of the
// burst occupying each slot. Reused across keys; clear() only touches what was
// marked.
class DenseTimeline {
 public:
  explicit DenseTimeline(Micros period) : owner_(static_cast<std::size_t>(period), -1) {}

  // Marks [begin, begin+length) mod period for `idx`; returns the distinct
  // earlier owners it collided with.
  std::vector<int> mark(Micros begin, Micros length, int idx) {
    std::vector<int> hits;
    const Micros p = static_cast<Micros>(owner_.size());
    Micros t = ((begin % p) + p) % p;
    for (Micros k = 0; k < length; ++k, ++t) {
      if (t == p) t = 0;
      int& o = owner_[static_cast<std::size_t>(t)];
      if (o == -1) {
        o = idx;
      } else if (o != idx && std::find(hits.begin(), hits.end(), o) == hits.end()) {
        hits.push_back(o);
      }
    }
    touched_.emplace_back(begin, length);
    return hits;
  }

  void clear() {
    const Micros p = static_cast<Micros>(owner_.size());
    for (const auto& [begin, length] : touched_) {
      Micros t = ((begin % p) + p) % p;
      for (Micros k = 0; k < length; ++k, ++t) {
        if (t == p) t = 0;
        owner_[static_cast<std::size_t>(t)] = -1;
      }
    }
    touched_.clear();
  }

  int at(Micros t) const {
    const Micros p = static_cast<Micros>(owner_.size());
    return owner_[static_cast<std::size_t>(((t % p) + p) % p)];
  }

 private:
  std::vector<int> owner_;
  std::vector<std::pair<Micros, Micros>> touched_;
};

Micros mod(Micros t, Micros p) { return ((t % p) + p) % p; }

// Forward gap from the end of window a to the start of window b on the
// periodic time axis, or a negative value when the windows overlap.
Micros cyclic_gap(Micros a_begin, Micros a_len, Micros b_begin, Micros b_len, Micros p) {
  if (mod(b_begin - a_begin, p) < a_len || mod(a_begin - b_begin, p) < b_len) return -1;
  return mod(b_begin - (a_begin + a_len), p);
}

class Checker {
 public:
  Checker(const GnssSchedule& s, const CellGrid& grid, std::span<const SvState> states,
          const ConstellationConfig& config, const TimingParams& timing, double geo_halfwidth)
      : s_(s),
        grid_(grid),
        states_(states),
        config_(config),
        timing_(timing),
        layout_(config.n_beams, config.n_channels, config.n_bc),
        geo_halfwidth_(geo_halfwidth),
        p_(s.period),
        rx_len_(timing.burst + s.sweep_constant) {}

  FeasibilityReport run() {
    report_.assignments_checked = s_.assignments.size();
    check_consistency();
    check_counts();
    check_tx();
    check_rx();
    check_neighbors();
    check_visibility();
    return std::move(report_);
  }

 private:
  void add(int constraint, std::string detail, std::vector<int> cells, std::vector<int> svs,
           std::vector<Micros> times) {
    report_.violations.push_back({constraint, std::move(detail), std::move(cells), std::move(svs), std::move(times)});
    ++report_.counts[static_cast<std::size_t>(constraint)];
  }

  const Assignment& at(int i) const { return s_.assignments[static_cast<std::size_t>(i)]; }
  bool is_valid(int i) const { return valid_[static_cast<std::size_t>(i)]; }
  Micros arrival(const Assignment& a) const { return mod(a.t_tx + a.flight, p_); }

  void check_consistency() {
    const int n_cells = static_cast<int>(grid_.size());
    const int n_sats = static_cast<int>(states_.size());
    valid_.assign(s_.assignments.size(), true);
    for (std::size_t i = 0; i < s_.assignments.size(); ++i) {
      const Assignment& a = s_.assignments[i];
      std::string bad;
      if (a.cell_id < 0 || a.cell_id >= n_cells) bad = "cell id out of range";
      else if (a.sv_id < 0 || a.sv_id >= n_sats) bad = "sv id out of range";
      else if (a.beam_id < 0 || a.beam_id >= config_.n_beams) bad = "beam id out of range";
      else if (!layout_.contains(a.beam_id, a.channel_id)) bad = "channel not carried by the beam";
      else if (a.t_tx < 0 || a.t_tx >= p_) bad = "t_tx outside [0, period)";
      else if (a.signal_index < 1 || a.signal_index > s_.n) bad = "signal index outside 1..n";
      else if (a.sweep != s_.sweep_constant) bad = "T_sweep differs from the grid constant";
      if (!bad.empty()) {
        valid_[i] = false;
        add(kConsistencyConstraint, bad, {a.cell_id}, {a.sv_id}, {a.t_tx});
        continue;
      }
      auto primary = s_.primary_map.find(a.cell_id);
      const bool is_primary = primary != s_.primary_map.end() && primary->second == a.sv_id;
      if (is_primary != (a.kind == AssignmentKind::primary))
        add(kConsistencyConstraint, "kind does not match the primary map", {a.cell_id}, {a.sv_id}, {a.t_tx});
      const auto& sv = states_[static_cast<std::size_t>(a.sv_id)];
      const Cell& cell = grid_.cell(a.cell_id);
      try {
        const Micros expect = quantize_flight(flight_time(sv, cell, grid_.params()));
        if (std::llabs(expect - a.flight) > 1)
          add(kConsistencyConstraint,
              "T_flight " + std::to_string(a.flight) + " us, geometry gives " + std::to_string(expect) + " us",
              {a.cell_id}, {a.sv_id}, {a.t_tx});
      } catch (const GeometryError&) {
        // below the horizon: reported by the visibility check
      }
    }
    if (s_.sweep_constant != quantize_sweep(sweep_time(grid_.params())))
      add(kConsistencyConstraint, "schedule T_sweep constant does not match the grid", {}, {}, {s_.sweep_constant});
  }

  // 1: n bursts per served cell, each signal index once.
  void check_counts() {
    std::map<int, std::vector<int>> by_cell;
    for (const auto& [cell, sv] : s_.primary_map) by_cell[cell];
    for (int i = 0; i < static_cast<int>(s_.assignments.size()); ++i)
      if (is_valid(i)) by_cell[at(i).cell_id].push_back(at(i).signal_index);
    for (auto& [cell, sigs] : by_cell) {
      std::sort(sigs.begin(), sigs.end());
      std::vector<int> expected(static_cast<std::size_t>(s_.n));
      for (int k = 0; k < s_.n; ++k) expected[static_cast<std::size_t>(k)] = k + 1;
      if (sigs != expected)
        add(1, "cell has " + std::to_string(sigs.size()) + " bursts, expected signals 1.." + std::to_string(s_.n),
            {cell}, {}, {});
      if (!s_.primary_map.count(cell)) add(1, "served cell has no primary SV", {cell}, {}, {});
    }
  }

  // 2, 3, 6: per SV beam.
  void check_tx() {
    std::unordered_map<std::int64_t, std::vector<int>> by_beam;
    for (int i = 0; i < static_cast<int>(s_.assignments.size()); ++i)
      if (is_valid(i)) by_beam[static_cast<std::int64_t>(at(i).sv_id) * config_.n_beams + at(i).beam_id].push_back(i);
    std::vector<std::int64_t> keys;
    keys.reserve(by_beam.size());
    for (const auto& kv : by_beam) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());

    DenseTimeline whole(p_), chan(p_);
    for (std::int64_t key : keys) {
      auto& idx = by_beam[key];
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return at(a).t_tx < at(b).t_tx || (at(a).t_tx == at(b).t_tx && a < b); });

      // 2: secondary bursts take every channel of the beam; primary bursts
      // take their own channel.
      for (int i : idx) {
        if (at(i).kind != AssignmentKind::secondary) continue;
        for (int j : whole.mark(at(i).t_tx, timing_.burst, i)) tx_overlap(i, j);
      }
      std::map<int, std::vector<int>> primaries;
      for (int i : idx)
        if (at(i).kind == AssignmentKind::primary) primaries[at(i).channel_id].push_back(i);
      for (const auto& [ch, list] : primaries) {
        for (int i : list) {
          for (int j : chan.mark(at(i).t_tx, timing_.burst, i)) tx_overlap(i, j);
          std::vector<int> hit;
          for (Micros k = 0; k < timing_.burst; ++k) {
            const int o = whole.at(at(i).t_tx + k);
            if (o != -1 && std::find(hit.begin(), hit.end(), o) == hit.end()) hit.push_back(o);
          }
          for (int j : hit) tx_overlap(i, j);
        }
        chan.clear();
      }
      whole.clear();

      // 3: different-cell bursts on one beam are at least T_switch_TX apart.
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          const Assignment& x = at(idx[a]);
          const Assignment& y = at(idx[b]);
          if (x.cell_id == y.cell_id) continue;
          const Micros g1 = cyclic_gap(x.t_tx, timing_.burst, y.t_tx, timing_.burst, p_);
          const Micros g2 = cyclic_gap(y.t_tx, timing_.burst, x.t_tx, timing_.burst, p_);
          const bool shared = x.kind == AssignmentKind::secondary || y.kind == AssignmentKind::secondary ||
                              x.channel_id == y.channel_id;
          if (g1 < 0 && shared) continue;  // reported under constraint 2
          if (g1 < 0 || std::min(g1, g2) < timing_.switch_tx)
            add(3, "bursts to different cells on one beam closer than T_switch_TX", {x.cell_id, y.cell_id},
                {x.sv_id, y.sv_id}, {x.t_tx, y.t_tx});
        }

      // 6: forward switches to new coefficients need T_setup_TX since the
      // previous switching activity on the beam.
      std::vector<int> sec;
      for (int i : idx)
        if (at(i).kind == AssignmentKind::secondary) sec.push_back(i);
      for (std::size_t k = 0; k < sec.size() && sec.size() > 1; ++k) {
        const Assignment& prev = at(sec[(k + sec.size() - 1) % sec.size()]);
        const Assignment& cur = at(sec[k]);
        if (prev.cell_id == cur.cell_id) continue;  // switch back to the most recent coefficients
        const Micros prev_end = prev.t_tx + timing_.burst + timing_.switch_tx;
        const Micros gap = mod(cur.t_tx - timing_.switch_tx - prev_end, p_);
        if (gap < timing_.setup_tx)
          add(6, "beam re-pointed with less than T_setup_TX to load coefficients", {prev.cell_id, cur.cell_id},
              {cur.sv_id}, {prev.t_tx, cur.t_tx});
      }
    }
  }

  void tx_overlap(int i, int j) {
    add(2, "overlapping bursts on one SV beam-channel", {at(j).cell_id, at(i).cell_id}, {at(i).sv_id},
        {at(j).t_tx, at(i).t_tx});
  }

  // 4, 5, 7: per cell-channel and per cell.
  void check_rx() {
    std::map<std::pair<int, int>, std::vector<int>> by_key;
    std::map<int, std::vector<int>> by_cell;
    for (int i = 0; i < static_cast<int>(s_.assignments.size()); ++i) {
      if (!is_valid(i)) continue;
      by_key[{at(i).cell_id, at(i).channel_id}].push_back(i);
      by_cell[at(i).cell_id].push_back(i);
    }
    DenseTimeline line(p_);
    for (auto& [key, idx] : by_key) {
      for (int i : idx)
        for (int j : line.mark(arrival(at(i)), rx_len_, i))
          add(4, "overlapping receive windows on one cell-channel", {key.first}, {at(j).sv_id, at(i).sv_id},
              {arrival(at(j)), arrival(at(i))});
      line.clear();
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          const Assignment& x = at(idx[a]);
          const Assignment& y = at(idx[b]);
          if (x.sv_id == y.sv_id) continue;
          const Micros g1 = cyclic_gap(arrival(x), rx_len_, arrival(y), rx_len_, p_);
          if (g1 < 0) continue;
          const Micros g2 = cyclic_gap(arrival(y), rx_len_, arrival(x), rx_len_, p_);
          if (std::min(g1, g2) < timing_.switch_rx)
            add(5, "receive windows from different SVs closer than T_switch_RX", {key.first}, {x.sv_id, y.sv_id},
                {arrival(x), arrival(y)});
        }
    }
    for (auto& [cell, idx] : by_cell) {
      std::vector<int> sec;
      for (int i : idx)
        if (at(i).kind == AssignmentKind::secondary) sec.push_back(i);
      std::sort(sec.begin(), sec.end(), [&](int a, int b) {
        return arrival(at(a)) < arrival(at(b)) || (arrival(at(a)) == arrival(at(b)) && a < b);
      });
      for (std::size_t k = 0; k < sec.size() && sec.size() > 1; ++k) {
        const Assignment& prev = at(sec[(k + sec.size() - 1) % sec.size()]);
        const Assignment& cur = at(sec[k]);
        if (prev.sv_id == cur.sv_id) continue;
        const Micros prev_end = arrival(prev) + rx_len_ + timing_.switch_rx;
        const Micros gap = mod(arrival(cur) - timing_.switch_rx - prev_end, p_);
        if (gap < timing_.setup_rx)
          add(7, "terminal array re-pointed with less than T_setup_RX", {cell}, {prev.sv_id, cur.sv_id},
              {arrival(prev), arrival(cur)});
      }
    }
  }

  // 8: neighbor cells on one channel never overlap in arrival time.
  void check_neighbors() {
    std::unordered_map<std::int64_t, std::vector<int>> by_key;
    auto key = [&](int cell, int ch) { return static_cast<std::int64_t>(cell) * config_.n_channels + ch; };
    for (int i = 0; i < static_cast<int>(s_.assignments.size()); ++i)
      if (is_valid(i)) by_key[key(at(i).cell_id, at(i).channel_id)].push_back(i);
    for (int i = 0; i < static_cast<int>(s_.assignments.size()); ++i) {
      if (!is_valid(i)) continue;
      const Assignment& x = at(i);
      for (int nb : grid_.cell(x.cell_id).neighbor_ids) {
        if (nb < x.cell_id) continue;  // each unordered pair once
        auto found = by_key.find(key(nb, x.channel_id));
        if (found == by_key.end()) continue;
        for (int j : found->second)
          if (cyclic_gap(arrival(x), rx_len_, arrival(at(j)), rx_len_, p_) < 0)
            add(8, "neighbor cells receive on one channel at overlapping times", {x.cell_id, nb},
                {x.sv_id, at(j).sv_id}, {arrival(x), arrival(at(j))});
      }
    }
  }

  void check_visibility() {
    for (int i = 0; i < static_cast<int>(s_.assignments.size()); ++i) {
      if (!is_valid(i)) continue;
      const Assignment& a = at(i);
      const auto los = line_of_sight(states_[static_cast<std::size_t>(a.sv_id)], grid_.cell(a.cell_id).center,
                                     grid_.params(), geo_halfwidth_);
      if (!los.usable())
        add(kVisibilityConstraint, "SV not usable from the cell (" + std::string(to_string(los.excluded)) + ")",
            {a.cell_id}, {a.sv_id}, {a.t_tx});
    }
  }

  const GnssSchedule& s_;
  const CellGrid& grid_;
  std::span<const SvState> states_;
  const ConstellationConfig& config_;
  const TimingParams& timing_;
  BeamChannelLayout layout_;
  double geo_halfwidth_;
  Micros p_;
  Micros rx_len_;
  std::vector<bool> valid_;
  FeasibilityReport report_;
};

}  // namespace

FeasibilityReport check_feasibility(const GnssSchedule& schedule, const CellGrid& grid,
                                    std::span<const SvState> states, const ConstellationConfig& config,
                                    const TimingParams& timing, double geo_mask_halfwidth_deg) {
  if (schedule.period != timing.period) throw ParameterError("schedule period differs from the timing parameters");
  if (schedule.period <= 0) throw ParameterError("schedule period must be > 0");
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].sv_id != static_cast<int>(i)) throw ParameterError("SV states must be indexed by sv id");
  return Checker(schedule, grid, states, config, timing, geo_mask_halfwidth_deg).run();
}

}  // namespace fusedleo
