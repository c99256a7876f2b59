#pragma once

#include <stdexcept>
#include <vector>

#include "fusedleo/constellation.hpp"
#include "fusedleo/feasibility.hpp"
#include "fusedleo/geo_cells.hpp"
#include "fusedleo/schedule.hpp"

namespace fusedleo::testing {

// SV placed so that it appears at (el, az) from `site` at altitude `alt_km`.
inline SvState sv_seen_at(int id, GeoPoint site, double el_deg, double az_deg, double alt_km = 550.0) {
  const double la = deg2rad(site.lat_deg), lo = deg2rad(site.lon_deg);
  const Eigen::Vector3d east(-std::sin(lo), std::cos(lo), 0.0);
  const Eigen::Vector3d north(-std::sin(la) * std::cos(lo), -std::sin(la) * std::sin(lo), std::cos(la));
  const Eigen::Vector3d up = unit_vector(site);
  const double el = deg2rad(el_deg), az = deg2rad(az_deg);
  const Eigen::Vector3d dir = std::cos(el) * std::sin(az) * east + std::cos(el) * std::cos(az) * north + std::sin(el) * up;
  SvState s;
  s.sv_id = id;
  s.position_km = kEarthRadiusKm * up + slant_range(alt_km, el_deg) * dir;
  return s;
}

// Constellation config whose size matches `n` hand-placed SVs.
inline ConstellationConfig config_for(int n) {
  ConstellationConfig c;
  ShellConfig shell;
  shell.n_planes = 1;
  shell.sats_per_plane = n;
  c.shells = {shell};
  return c;
}

inline SvState sv_over(int id, GeoPoint sub, double alt_km = 550.0) {
  SvState s;
  s.sv_id = id;
  s.position_km = ecef(sub, kEarthRadiusKm + alt_km);
  return s;
}

// Two cells 3 degrees of longitude apart at 50N (about 214 km), served with
// n = 4. Both primaries ride SV 0 which sits between them; each cell has its
// own three secondary SVs.
struct TwoCells {
  CellGrid grid;
  ConstellationConfig config;
  TimingParams timing;
  std::vector<SvState> states;
  GnssSchedule schedule;

  explicit TwoCells(bool adjacent = false) : grid(make_grid(adjacent)) {
    config = config_for(7);
    config.n_beams = 15;
    config.n_channels = 76;
    config.n_bc = 264;
    timing.n = 4;
    const GeoPoint a = grid.cell(0).center, b = grid.cell(1).center;
    states.push_back(sv_over(0, {50.0, 1.5}));
    states.push_back(sv_seen_at(1, a, 60, 0));
    states.push_back(sv_seen_at(2, a, 60, 90));
    states.push_back(sv_seen_at(3, a, 60, 270));
    states.push_back(sv_seen_at(4, b, 60, 0));
    states.push_back(sv_seen_at(5, b, 60, 90));
    states.push_back(sv_seen_at(6, b, 60, 270));

    schedule.period = timing.period;
    schedule.n = 4;
    schedule.sweep_constant = quantize_sweep(sweep_time(grid.params()));
    schedule.primary_map = {{0, 0}, {1, 0}};
    add(0, 1, 0, 0, 0, 10'000, AssignmentKind::primary);
    add(0, 2, 1, 0, 1, 200'000);
    add(0, 3, 2, 0, 1, 400'000);
    add(0, 4, 3, 0, 1, 600'000);
    add(1, 1, 0, 0, 0, 510'000, AssignmentKind::primary);
    add(1, 2, 4, 0, 2, 250'000);
    add(1, 3, 5, 0, 2, 450'000);
    add(1, 4, 6, 0, 2, 650'000);
  }

  static CellGrid make_grid(bool adjacent) {
    GridParams p;
    p.cell_diameter_km = 29;
    std::vector<Cell> cells(2);
    cells[0] = {0, {50.0, 0.0}, {}};
    cells[1] = {1, {50.0, 3.0}, {}};
    if (adjacent) {
      cells[0].neighbor_ids = {1};
      cells[1].neighbor_ids = {0};
    }
    return CellGrid::from_cells(p, cells);
  }

  Assignment make(int cell, int s, int sv, int beam, int channel, Micros t,
                  AssignmentKind kind = AssignmentKind::secondary) const {
    Assignment x;
    x.cell_id = cell;
    x.signal_index = s;
    x.sv_id = sv;
    x.beam_id = beam;
    x.channel_id = channel;
    x.t_tx = t;
    x.flight = quantize_flight(flight_time(states[static_cast<std::size_t>(sv)], grid.cell(cell), grid.params()));
    x.sweep = schedule.sweep_constant;
    x.kind = kind;
    return x;
  }

  void add(int cell, int s, int sv, int beam, int channel, Micros t, AssignmentKind kind = AssignmentKind::secondary) {
    schedule.assignments.push_back(make(cell, s, sv, beam, channel, t, kind));
  }

  Assignment& find(int cell, int s) {
    for (auto& x : schedule.assignments)
      if (x.cell_id == cell && x.signal_index == s) return x;
    throw std::out_of_range("no such assignment");
  }

  // Re-derives T_flight after an SV or cell change.
  void refresh(Assignment& x) { x = make(x.cell_id, x.signal_index, x.sv_id, x.beam_id, x.channel_id, x.t_tx, x.kind); }

  FeasibilityReport check() const { return check_feasibility(schedule, grid, states, config, timing); }
};

}  // namespace fusedleo::testing
