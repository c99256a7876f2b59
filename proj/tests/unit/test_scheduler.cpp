#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "fusedleo/cost_model.hpp"
#include "fusedleo/errors.hpp"
#include "fusedleo/scheduler.hpp"
#include "support.hpp"

using namespace fusedleo;
using fusedleo::testing::sv_seen_at;

namespace {

// One cell at 50N with SVs exactly along the five goal directions.
struct GoalCell {
  CellGrid grid;
  ConstellationConfig config;
  TimingParams timing;
  std::vector<SvState> states;

  GoalCell() : grid(make()), config(fusedleo::testing::config_for(5)) {
    const GeoPoint c = grid.cell(0).center;
    states = {sv_seen_at(0, c, 45, 270), sv_seen_at(1, c, 45, 180), sv_seen_at(2, c, 90, 0),
              sv_seen_at(3, c, 45, 0), sv_seen_at(4, c, 45, 90)};
  }
  static CellGrid make() {
    GridParams p;
    p.cell_diameter_km = 29;
    return CellGrid::from_cells(p, {Cell{0, {50.0, 10.0}, {}}});
  }
};

CellGrid band_grid(double lat_max) {
  GridParams p = fusedleo::testing::desk_scenario().grid;
  p.lat_max_deg = lat_max;
  return CellGrid::build(p);
}

}  // namespace

TEST_SUITE("scheduler") {
  TEST_CASE("one cell with SVs on the goal directions") {
    GoalCell f;
    SchedulerConfig cfg;
    const auto r = greedy_schedule(f.grid, f.config, f.states, f.timing, cfg);
    CHECK(r.stats.complete());
    CHECK(r.stats.total_steps == 5 + r.stats.conflicts_tx + r.stats.conflicts_rx);
    REQUIRE(r.schedule.assignments.size() == 5);
    const std::vector<int> expect_sv{2, 3, 4, 1, 0};  // zenith, N, E, S, W
    std::set<int> used;
    for (const auto& a : r.schedule.assignments) {
      CHECK(a.sv_id == expect_sv[static_cast<std::size_t>(a.signal_index - 1)]);
      used.insert(a.sv_id);
    }
    CHECK(used.size() == 5);
    CHECK(r.schedule.primary_map.at(0) == 2);
    CHECK(check_feasibility(r.schedule, f.grid, f.states, f.config, f.timing).feasible());
  }

  TEST_CASE("randomized on one empty cell takes about one step per signal") {
    GoalCell f;
    double steps = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      SchedulerConfig cfg;
      cfg.mode = SchedulerMode::randomized;
      cfg.rng_seed = seed;
      const auto r = randomized_schedule(f.grid, f.config, f.states, f.timing, cfg);
      REQUIRE(r.stats.complete());
      CHECK(check_feasibility(r.schedule, f.grid, f.states, f.config, f.timing).feasible());
      steps += static_cast<double>(r.stats.total_steps);
    }
    CHECK(steps / 50 / f.timing.n <= 1.1);
  }

  TEST_CASE("adjacent cells forced onto one channel stay disjoint in arrival") {
    fusedleo::testing::TwoCells f(true);
    f.config.n_beams = 1;
    f.config.n_channels = 1;
    f.config.n_bc = 1;
    for (auto mode : {SchedulerMode::greedy, SchedulerMode::randomized}) {
      SchedulerConfig cfg;
      cfg.mode = mode;
      const auto r = mode == SchedulerMode::greedy ? greedy_schedule(f.grid, f.config, f.states, f.timing, cfg)
                                                   : randomized_schedule(f.grid, f.config, f.states, f.timing, cfg);
      REQUIRE(r.stats.complete());
      CHECK(check_feasibility(r.schedule, f.grid, f.states, f.config, f.timing).feasible());
      const Micros P = f.timing.period;
      for (const auto& a : r.schedule.assignments)
        for (const auto& b : r.schedule.assignments) {
          if (a.cell_id != 0 || b.cell_id != 1) continue;
          const Micros len = f.timing.burst + a.sweep;
          const Micros d = ((b.arrival(P) - a.arrival(P)) % P + P) % P;
          CHECK(d >= len);
          CHECK(P - d >= len);
        }
    }
  }

  TEST_CASE("200-cell band: both schedulers pass the checker") {
    const Scenario s = fusedleo::testing::desk_scenario();
    const CellGrid grid = band_grid(5);
    CHECK(grid.size() > 150);
    CHECK(grid.size() < 260);
    const auto states = propagate(s.constellation, 0);
    for (auto mode : {SchedulerMode::greedy, SchedulerMode::randomized})
      for (auto order : {CellOrder::id, CellOrder::random, CellOrder::geo}) {
        SchedulerConfig cfg = s.scheduler;
        cfg.mode = mode;
        cfg.order = order;
        const auto r = run_scheduler(grid, s.constellation, s.timing, cfg);
        CHECK(r.stats.complete());
        const auto report = check_feasibility(r.schedule, grid, states, s.constellation, s.timing);
        CHECK(report.feasible());
        CHECK(r.schedule.assignments.size() == grid.size() * static_cast<std::size_t>(s.timing.n));
      }
  }

  TEST_CASE("deterministic for a fixed seed") {
    const Scenario s = fusedleo::testing::desk_scenario();
    const CellGrid grid = band_grid(10);
    SchedulerConfig cfg = s.scheduler;
    cfg.mode = SchedulerMode::randomized;
    cfg.rng_seed = 17;
    const auto a = run_scheduler(grid, s.constellation, s.timing, cfg);
    const auto b = run_scheduler(grid, s.constellation, s.timing, cfg);
    CHECK(a.schedule == b.schedule);
    CHECK(a.stats.total_steps == b.stats.total_steps);
    cfg.rng_seed = 18;
    CHECK(!(run_scheduler(grid, s.constellation, s.timing, cfg).schedule == a.schedule));
    cfg.mode = SchedulerMode::greedy;
    CHECK(run_scheduler(grid, s.constellation, s.timing, cfg).schedule ==
          run_scheduler(grid, s.constellation, s.timing, cfg).schedule);
  }

  TEST_CASE("signal 1 goes to an SV near zenith") {
    const Scenario s = fusedleo::testing::desk_scenario();
    const CellGrid grid = band_grid(10);
    const auto states = propagate(s.constellation, 0);
    const auto r = greedy_schedule(grid, s.constellation, states, s.timing, s.scheduler);
    int checked = 0;
    for (const auto& a : r.schedule.assignments) {
      if (a.signal_index != 1) continue;
      CHECK(a.kind == AssignmentKind::primary);
      const auto los = visible_svs(states, grid.cell(a.cell_id), grid.params(), 5);
      double best = -90;
      int best_id = -1;
      for (const auto& l : los)
        if (l.usable() && l.elevation_deg > best) {
          best = l.elevation_deg;
          best_id = l.sv_id;
        }
      CHECK(a.sv_id == best_id);
      ++checked;
    }
    CHECK(checked == static_cast<int>(grid.size()));
  }

  TEST_CASE("secondaries use distinct SVs other than the primary") {
    const Scenario s = fusedleo::testing::desk_scenario();
    const CellGrid grid = band_grid(10);
    const auto r = run_scheduler(grid, s.constellation, s.timing, s.scheduler);
    std::map<int, std::set<int>> per_cell;
    for (const auto& a : r.schedule.assignments) per_cell[a.cell_id].insert(a.sv_id);
    for (const auto& [cell, svs] : per_cell) CHECK(svs.size() == static_cast<std::size_t>(s.timing.n));
  }

  TEST_CASE("n = 0 leaves the cubes empty") {
    Scenario s = fusedleo::testing::desk_scenario();
    s.timing.n = 0;
    const CellGrid grid = band_grid(10);
    for (auto mode : {SchedulerMode::greedy, SchedulerMode::randomized}) {
      s.scheduler.mode = mode;
      const auto r = run_scheduler(grid, s.constellation, s.timing, s.scheduler);
      CHECK(r.schedule.assignments.empty());
      CHECK(r.tx.empty());
      CHECK(r.rx.empty());
      CHECK(r.tx_setup.empty());
      CHECK(r.rx_setup.empty());
      CostParams p = s.cost_params();
      p.n_cells = static_cast<double>(grid.size());
      const auto m = measure_reservations(r.schedule, r.tx, r.rx, p);
      CHECK(m.r_tx == 0);
      CHECK(m.r_rx == 0);
      CHECK(m.r_su == 0);
      CHECK(m.r_e == 0);
    }
  }

  TEST_CASE("too few SVs produces a failure list") {
    Scenario s = fusedleo::testing::desk_scenario();
    for (auto& sh : s.constellation.shells) sh.n_planes = 3;
    const CellGrid grid = band_grid(10);
    const auto r = run_scheduler(grid, s.constellation, s.timing, s.scheduler);
    CHECK(!r.stats.complete());
    for (const auto& f : r.stats.cells_failed) CHECK(f.reason.find("usable SVs") != std::string::npos);
    // failed cells are rolled back, the rest stays feasible
    std::set<int> failed;
    for (const auto& f : r.stats.cells_failed) failed.insert(f.cell_id);
    for (const auto& a : r.schedule.assignments) CHECK(!failed.count(a.cell_id));
  }

  TEST_CASE("cell orders are permutations") {
    const CellGrid grid = band_grid(20);
    std::vector<int> ids(grid.size());
    std::iota(ids.begin(), ids.end(), 0);
    for (auto order : {CellOrder::id, CellOrder::random, CellOrder::geo}) {
      auto o = cell_order(grid, order, 3);
      CHECK(o.size() == grid.size());
      std::sort(o.begin(), o.end());
      CHECK(o == ids);
    }
    CHECK(cell_order(grid, CellOrder::id, 3) == ids);
    CHECK(cell_order(grid, CellOrder::random, 3) == cell_order(grid, CellOrder::random, 3));
    CHECK(cell_order(grid, CellOrder::random, 3) != cell_order(grid, CellOrder::random, 4));
  }

  TEST_CASE("geo order sweeps west to east") {
    const CellGrid grid = band_grid(20);
    const auto o = cell_order(grid, CellOrder::geo, 0);
    CHECK(grid.cell(o.front()).center.lon_deg < -170);
    CHECK(grid.cell(o.back()).center.lon_deg > 170);
  }

  TEST_CASE("mode and order names") {
    CHECK(parse_scheduler_mode("randomized") == SchedulerMode::randomized);
    CHECK(parse_cell_order("geo") == CellOrder::geo);
    CHECK(to_string(CellOrder::random) == "random");
    CHECK_THROWS_AS(parse_cell_order("spiral"), ParameterError);
    CHECK_THROWS_AS(parse_scheduler_mode("annealing"), ParameterError);
  }

  TEST_CASE("complexity bound") {
    CHECK(complexity_bound(5, 850'000, 0.016, 0.0003) == doctest::Approx(4.4e6).epsilon(0.02));
    CHECK(complexity_bound(5, 1000, 0, 0) == 5000);
    CHECK(complexity_bound(5, 1e4, 0.01, 0.002) == doctest::Approx(5e4 / (1 - 0.02 - 0.004)));
    CHECK_THROWS_AS(complexity_bound(5, 1000, 0.3, 0.2), SaturationError);
  }

  TEST_CASE("desk greedy occupancy stays under the analytic bounds") {
    const Scenario s = fusedleo::testing::desk_scenario();
    const CellGrid grid = CellGrid::build(s.grid);
    const auto r = run_scheduler(grid, s.constellation, s.timing, s.scheduler);
    REQUIRE(r.stats.complete());
    CostParams p = s.cost_params();
    p.n_cells = static_cast<double>(grid.size());
    const auto m = measure_reservations(r.schedule, r.tx, r.rx, p);
    CHECK(m.r_tx <= tx_reservation_bound(p));
    CHECK(m.r_rx <= rx_reservation_bound(p));
    CHECK(m.r_su <= setup_reservation(p) + 1e-15);
    CHECK(m.r_e <= energy_reservation(p) + 1e-15);
  }
}
