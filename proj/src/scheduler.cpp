#include "fusedleo/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "fusedleo/errors.hpp"
#include "fusedleo/feasibility.hpp"

namespace fusedleo {

std::string_view to_string(SchedulerMode m) { return m == SchedulerMode::greedy ? "greedy" : "randomized"; }

std::string_view to_string(CellOrder o) {
  switch (o) {
    case CellOrder::id: return "id";
    case CellOrder::random: return "random";
    case CellOrder::geo: return "geo";
  }
  return "?";
}

SchedulerMode parse_scheduler_mode(std::string_view s) {
  if (s == "greedy") return SchedulerMode::greedy;
  if (s == "randomized" || s == "random") return SchedulerMode::randomized;
  throw ParameterError("unknown scheduler mode '" + std::string(s) + "' (greedy|randomized)");
}

CellOrder parse_cell_order(std::string_view s) {
  if (s == "id") return CellOrder::id;
  if (s == "random") return CellOrder::random;
  if (s == "geo") return CellOrder::geo;
  throw ParameterError("unknown cell order '" + std::string(s) + "' (id|random|geo)");
}

void SchedulerConfig::validate() const {
  if (max_attempts_per_signal < 1) throw ParameterError("scheduler: max_attempts_per_signal must be >= 1");
  if (epoch_s < 0) throw ParameterError("scheduler: epoch must be >= 0");
}

nlohmann::json to_json(const ScheduleStats& s) {
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& f : s.cells_failed) failed.push_back({{"cell_id", f.cell_id}, {"reason", f.reason}});
  return {{"total_steps", s.total_steps},
          {"conflicts_tx", s.conflicts_tx},
          {"conflicts_rx", s.conflicts_rx},
          {"cells_failed", std::move(failed)}};
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double complexity_bound(int n, double n_cells, double r_tx, double r_rx) {
  const double denom = 1.0 - 2.0 * r_tx - 2.0 * r_rx;
  if (denom <= 0) throw SaturationError("complexity bound: 2 R_TX + 2 R_RX >= 1");
  return n * n_cells / denom;
}

std::vector<int> cell_order(const CellGrid& grid, CellOrder order, std::uint64_t seed) {
  std::vector<int> ids(grid.size());
  std::iota(ids.begin(), ids.end(), 0);
  if (order == CellOrder::random) {
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
  } else if (order == CellOrder::geo) {
    const double strip_deg = rad2deg(grid.params().cell_diameter_km / grid.params().earth_radius_km);
    auto strip = [&](int id) { return static_cast<int>(std::floor((grid.cell(id).center.lon_deg + 180.0) / strip_deg)); };
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
      const int sa = strip(a), sb = strip(b);
      if (sa != sb) return sa < sb;
      const double la = grid.cell(a).center.lat_deg, lb = grid.cell(b).center.lat_deg;
      return sa % 2 == 0 ? la < lb : la > lb;
    });
  }
  return ids;
}

namespace {

// Reservation state plus the bookkeeping to place and roll back one cell.
class Planner {
 public:
  Planner(const CellGrid& grid, const ConstellationConfig& config, std::span<const SvState> states,
          const TimingParams& timing, const SchedulerConfig& sched)
      : grid_(grid),
        config_(config),
        states_(states),
        timing_(timing),
        sched_(sched),
        layout_(config.n_beams, config.n_channels, config.n_bc),
        index_(states, grid.params().earth_radius_km),
        result_{GnssSchedule{},
                ScheduleStats{},
                TxCube(timing.period, layout_, static_cast<int>(states.size())),
                RxCube(timing.period, static_cast<int>(grid.size()), config.n_channels),
                SetupTimeline(timing.period),
                SetupTimeline(timing.period)} {
    timing.validate();
    sched.validate();
    config.validate();
    if (static_cast<int>(states.size()) != config.n_sats())
      throw ParameterError("scheduler: SV state count differs from the constellation size");
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].sv_id != static_cast<int>(i)) throw ParameterError("scheduler: SV states must be indexed by sv id");
    beam_load_.assign(states.size() * static_cast<std::size_t>(config.n_beams), 0);
    sweep_ = quantize_sweep(sweep_time(grid.params()));
    result_.schedule.period = timing.period;
    result_.schedule.n = timing.n;
    result_.schedule.sweep_constant = sweep_;
  }

  // Usable lines of sight for a cell; throws InsufficientVisibilityError.
  std::vector<LineOfSight> usable(int cell_id) const {
    auto los = index_.in_view(grid_.cell(cell_id), grid_.params(), sched_.visibility.geo_mask_halfwidth_deg);
    std::erase_if(los, [](const LineOfSight& l) { return !l.usable(); });
    if (static_cast<int>(los.size()) < timing_.n)
      throw InsufficientVisibilityError(cell_id, static_cast<int>(los.size()), timing_.n);
    return los;
  }

  static int zenith_most(const std::vector<LineOfSight>& los) {
    const LineOfSight* best = &los.front();
    for (const auto& l : los)
      if (l.elevation_deg > best->elevation_deg || (l.elevation_deg == best->elevation_deg && l.sv_id < best->sv_id))
        best = &l;
    return best->sv_id;
  }

  // T_flight depends only on (cell, sv); probes of one cell reuse it.
  Micros flight(int cell_id, int sv) const {
    if (cell_id != flight_cell_) {
      flight_cache_.clear();
      flight_cell_ = cell_id;
    }
    auto [it, fresh] = flight_cache_.try_emplace(sv, 0);
    if (fresh)
      it->second = quantize_flight(flight_time(states_[static_cast<std::size_t>(sv)], grid_.cell(cell_id), grid_.params()));
    return it->second;
  }

  Assignment make(int cell_id, int s, int sv, int beam, int channel, Micros t, bool primary) const {
    Assignment a;
    a.cell_id = cell_id;
    a.signal_index = s;
    a.sv_id = sv;
    a.beam_id = beam;
    a.channel_id = channel;
    a.t_tx = ((t % timing_.period) + timing_.period) % timing_.period;
    a.flight = flight(cell_id, sv);
    a.sweep = sweep_;
    a.kind = primary ? AssignmentKind::primary : AssignmentKind::secondary;
    return a;
  }

  std::int64_t beam_key(const Assignment& a) const { return static_cast<std::int64_t>(a.sv_id) * config_.n_beams + a.beam_id; }
  Micros tx_setup_begin(const Assignment& a) const { return a.t_tx - timing_.switch_tx - timing_.setup_tx; }
  Micros tx_setup_length() const { return timing_.setup_tx + timing_.burst + 2 * timing_.switch_tx; }
  Micros rx_setup_begin(const Assignment& a) const {
    return a.arrival(timing_.period) - timing_.switch_rx - timing_.setup_rx;
  }
  Micros rx_setup_length() const { return timing_.setup_rx + timing_.burst + sweep_ + 2 * timing_.switch_rx; }

  // Probes every reservation `a` needs; on conflict returns the forward time
  // shift that clears the blocking interval.
  std::optional<Micros> probe(const Assignment& a) {
    ++result_.stats.total_steps;
    const TxPlan plan = tx_plan(a, timing_);
    std::optional<Conflict> c = result_.tx.probe(plan.requests, plan.guards);
    if (!c && a.kind == AssignmentKind::secondary)
      c = result_.tx_setup.probe(beam_key(a), tx_setup_begin(a), tx_setup_length());
    if (c) {
      ++result_.stats.conflicts_tx;
      return c->shift;
    }
    const auto rx = rx_requests(grid_, a, timing_);
    c = result_.rx.probe(rx);
    if (!c && a.kind == AssignmentKind::secondary)
      c = result_.rx_setup.probe(a.cell_id, rx_setup_begin(a), rx_setup_length());
    if (c) {
      ++result_.stats.conflicts_rx;
      return c->shift;
    }
    return std::nullopt;
  }

  void commit(const Assignment& a) {
    const TxPlan plan = tx_plan(a, timing_);
    const auto rx = rx_requests(grid_, a, timing_);
    if (result_.tx.reserve(plan.requests, plan.guards) || result_.rx.reserve(rx))
      throw Error("scheduler: reservation failed after a clean probe");
    if (a.kind == AssignmentKind::secondary) {
      result_.tx_setup.reserve(beam_key(a), tx_setup_begin(a), tx_setup_length(), a.cell_id);
      result_.rx_setup.reserve(a.cell_id, rx_setup_begin(a), rx_setup_length(), a.sv_id);
    }
    ++beam_load_[static_cast<std::size_t>(beam_key(a))];
    placed_.push_back(a);
  }

  void rollback() {
    for (const auto& a : placed_) {
      --beam_load_[static_cast<std::size_t>(beam_key(a))];
      result_.tx.release(tx_plan(a, timing_).requests);
      result_.rx.release(rx_requests(grid_, a, timing_));
      if (a.kind == AssignmentKind::secondary) {
        result_.tx_setup.release(beam_key(a), tx_setup_begin(a), tx_setup_length(), a.cell_id);
        result_.rx_setup.release(a.cell_id, rx_setup_begin(a), rx_setup_length(), a.sv_id);
      }
    }
    placed_.clear();
  }

  void accept_cell(int cell_id, int primary_sv) {
    result_.schedule.primary_map[cell_id] = primary_sv;
    for (const auto& a : placed_) result_.schedule.assignments.push_back(a);
    placed_.clear();
  }

  void fail_cell(int cell_id, std::string reason) {
    rollback();
    result_.stats.cells_failed.push_back({cell_id, std::move(reason)});
  }

  // Beams of `sv` by how many bursts they already carry, ties broken by a
  // per-cell rotation, so one beam does not absorb every set-up window.
  std::vector<int> beams_by_load(int sv, int cell_id) const {
    const int nb = config_.n_beams;
    const int rot = static_cast<int>(mix64(static_cast<std::uint64_t>(cell_id) + 1) % static_cast<std::uint64_t>(nb));
    std::vector<int> beams(static_cast<std::size_t>(nb));
    std::iota(beams.begin(), beams.end(), 0);
    const auto load = [&](int b) { return beam_load_[static_cast<std::size_t>(sv) * nb + b]; };
    std::stable_sort(beams.begin(), beams.end(), [&](int a, int b) {
      return load(a) != load(b) ? load(a) < load(b) : (a - rot + nb) % nb < (b - rot + nb) % nb;
    });
    return beams;
  }

  // Earliest-fit scan over one full period on a fixed (sv, beam, channel).
  std::optional<Assignment> scan(int cell_id, int s, int sv, int beam, int channel, bool primary, Micros start) {
    Micros offset = 0;
    while (offset < timing_.period) {
      const Assignment a = make(cell_id, s, sv, beam, channel, start + offset, primary);
      const auto shift = probe(a);
      if (!shift) return a;
      offset += *shift;
    }
    return std::nullopt;
  }

  ScheduleResult finish() {
    std::sort(result_.schedule.assignments.begin(), result_.schedule.assignments.end(),
              [](const Assignment& a, const Assignment& b) {
                return a.cell_id != b.cell_id ? a.cell_id < b.cell_id : a.signal_index < b.signal_index;
              });
    return std::move(result_);
  }

  const CellGrid& grid_;
  const ConstellationConfig& config_;
  std::span<const SvState> states_;
  const TimingParams& timing_;
  const SchedulerConfig& sched_;
  BeamChannelLayout layout_;
  SvIndex index_;
  ScheduleResult result_;
  Micros sweep_ = 0;
  std::vector<Assignment> placed_;
  std::vector<int> beam_load_;
  mutable int flight_cell_ = -1;
  mutable std::unordered_map<int, Micros> flight_cache_;
};

template <class PlaceCell>
ScheduleResult run(Planner& planner, const CellGrid& grid, const SchedulerConfig& sched, PlaceCell&& place) {
  const auto started = std::chrono::steady_clock::now();
  const bool serving = planner.timing_.n > 0;
  for (int cell_id : serving ? cell_order(grid, sched.order, sched.rng_seed) : std::vector<int>{}) {
    std::vector<LineOfSight> los;
    try {
      los = planner.usable(cell_id);
    } catch (const InsufficientVisibilityError& e) {
      planner.fail_cell(cell_id, e.what());
      continue;
    }
    const int primary = Planner::zenith_most(los);
    if (place(cell_id, los, primary))
      planner.accept_cell(cell_id, primary);
  }
  ScheduleResult result = planner.finish();
  result.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace

ScheduleResult greedy_schedule(const CellGrid& grid, const ConstellationConfig& config,
                               std::span<const SvState> states, const TimingParams& timing,
                               const SchedulerConfig& sched) {
  Planner planner(grid, config, states, timing, sched);
  auto place = [&](int cell_id, const std::vector<LineOfSight>& los, int primary) {
    const auto ranked = select_diverse(los, timing.n, sched.visibility.goal_elevation_deg, cell_id);
    const Micros start = static_cast<Micros>(mix64(static_cast<std::uint64_t>(cell_id)) %
                                             static_cast<std::uint64_t>(timing.period));
    std::vector<int> used{primary};
    for (int s = 1; s <= timing.n; ++s) {
      std::optional<Assignment> got;
      std::vector<int> candidates = s == 1 ? std::vector<int>{primary} : ranked[static_cast<std::size_t>(s - 1)];
      for (int sv : candidates) {
        if (s > 1 && std::find(used.begin(), used.end(), sv) != used.end()) continue;
        for (int beam : planner.beams_by_load(sv, cell_id)) {
          const auto channels = planner.layout_.channels(beam);
          const std::size_t first = static_cast<std::size_t>(cell_id) % channels.size();
          for (std::size_t k = 0; k < channels.size() && !got; ++k)
            got = planner.scan(cell_id, s, sv, beam, channels[(first + k) % channels.size()], s == 1, start);
          if (got) break;
        }
        if (got) break;
      }
      if (!got) {
        planner.fail_cell(cell_id, "no feasible slot for signal " + std::to_string(s));
        return false;
      }
      planner.commit(*got);
      if (s > 1) used.push_back(got->sv_id);
    }
    return true;
  };
  return run(planner, grid, sched, place);
}

ScheduleResult randomized_schedule(const CellGrid& grid, const ConstellationConfig& config,
                                   std::span<const SvState> states, const TimingParams& timing,
                                   const SchedulerConfig& sched) {
  Planner planner(grid, config, states, timing, sched);
  std::mt19937_64 rng(sched.rng_seed);
  std::uniform_int_distribution<int> pick_beam(0, config.n_beams - 1);
  std::uniform_int_distribution<Micros> pick_time(0, timing.period - 1);
  auto place = [&](int cell_id, const std::vector<LineOfSight>& los, int primary) {
    std::vector<int> pool;
    for (const auto& l : los)
      if (l.sv_id != primary) pool.push_back(l.sv_id);
    for (int s = 1; s <= timing.n; ++s) {
      std::optional<Assignment> got;
      for (int attempt = 0; attempt < sched.max_attempts_per_signal && !got; ++attempt) {
        int sv = primary;
        std::size_t slot = 0;
        if (s > 1) {
          slot = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
          sv = pool[slot];
        }
        const int beam = pick_beam(rng);
        const auto channels = planner.layout_.channels(beam);
        const int ch = channels[std::uniform_int_distribution<std::size_t>(0, channels.size() - 1)(rng)];
        const Assignment a = planner.make(cell_id, s, sv, beam, ch, pick_time(rng), s == 1);
        if (!planner.probe(a)) {
          got = a;
          if (s > 1) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(slot));
        }
      }
      if (!got) {
        planner.fail_cell(cell_id, "signal " + std::to_string(s) + " not placed within " +
                                       std::to_string(sched.max_attempts_per_signal) + " attempts");
        return false;
      }
      planner.commit(*got);
    }
    return true;
  };
  return run(planner, grid, sched, place);
}

ScheduleResult run_scheduler(const CellGrid& grid, const ConstellationConfig& config, const TimingParams& timing,
                             const SchedulerConfig& sched) {
  const auto states = propagate(config, sched.epoch_s, grid.params().earth_radius_km);
  return sched.mode == SchedulerMode::greedy ? greedy_schedule(grid, config, states, timing, sched)
                                             : randomized_schedule(grid, config, states, timing, sched);
}

}  // namespace fusedleo
