#include <doctest.h>

#include <cmath>
#include <random>

#include "fusedleo/cost_model.hpp"
#include "fusedleo/errors.hpp"
#include "fusedleo/scheduler.hpp"

using namespace fusedleo;

namespace {

CostParams baseline() { return CostParams::baseline(); }

CostParams desk() {
  CostParams p = baseline();
  p.n_cells = 2000;
  p.n_sats = 400;
  return p;
}

}  // namespace

TEST_SUITE("cost_model") {
  TEST_CASE("TX and RX reservations at the baseline") {
    const CostParams p = baseline();
    CHECK(p.t_sweep_us == doctest::Approx(74.1).epsilon(1e-3));
    CHECK(tx_reservation_bound(p) == doctest::Approx(0.0160).epsilon(0.003));
    CHECK(rx_reservation_bound(p) <= 0.0003);
    CHECK(rx_reservation_bound(p) == doctest::Approx(0.000275).epsilon(0.005));
  }

  TEST_CASE("TX bound in the primary-only limit") {
    CostParams p = baseline();
    p.timing.n = 1;
    p.timing.switch_tx = 0;
    CHECK(tx_reservation_bound(p) == doctest::Approx(p.n_cells * 500 / (264.0 * p.n_sats * 1e6)));
  }

  TEST_CASE("TX bound at desk parameters") {
    // Each secondary steers a whole beam, i.e. N_bc / N_beams beam-channels,
    // for T_burst + 2 T_switch.
    const double primary = 2000 * 500.0;
    const double secondary = 4 * 2000 * 700.0 * 264.0 / 15.0;
    CHECK(tx_reservation_bound(desk()) == doctest::Approx((primary + secondary) / (264.0 * 400 * 1e6)));
  }

  TEST_CASE("RX bound limits") {
    CostParams p = baseline();
    p.n_adj = 0;
    p.t_sweep_us = 0;
    p.timing.switch_rx = 0;
    CHECK(rx_reservation_bound(p) == doctest::Approx(5 * 500.0 / (76 * 1e6)));
    p = baseline();
    p.t_sweep_us = 0;  // elevation mask at 90 degrees
    CHECK(rx_reservation_bound(p) == doctest::Approx((5 * 7 * 500.0 + 2 * 4 * 100.0) / (76 * 1e6)));
    CHECK(rx_reservation_bound(p) == doctest::Approx(0.000241).epsilon(0.002));
  }

  TEST_CASE("downlink capacity") {
    const CostParams p = baseline();
    const auto d = downlink_capacity(p);
    CHECK(d.r_dl == doctest::Approx(0.0160).epsilon(0.003));
    CHECK(d.per_cell_loss_bps / 1e6 == doctest::Approx(5.7).epsilon(0.0175));
    CHECK(p.channel_rate_bps() == doctest::Approx(114.5e6));
    CHECK(d.per_cell_loss_bps == doctest::Approx(d.r_dl * d.bps_before / p.n_cells));
    CostParams zero = p;
    zero.timing.n = 0;
    const auto z = downlink_capacity(zero);
    CHECK(z.channels_before == z.channels_after);
    CHECK(z.r_dl == 0);
  }

  TEST_CASE("set-up reservation") {
    CostParams p = baseline();
    CHECK(setup_reservation(p) == doctest::Approx(0.113).epsilon(0.005));
    p.timing.setup_tx = 1000;
    CHECK(setup_reservation(p) == doctest::Approx(4 * 850000 * 1000.0 / (15 * 1e4 * 1e6)));
    CHECK(setup_reservation(p) == doctest::Approx(0.0227).epsilon(0.002));
    p.timing.n = 1;
    CHECK(setup_reservation(p) == 0);
  }

  TEST_CASE("energy reservation") {
    CostParams p = baseline();
    CHECK(energy_reservation(p) == doctest::Approx(0.0077).epsilon(0.01));
    p.par = 1;
    CHECK(energy_reservation(p) == doctest::Approx(5 * 850000 * 500.0 / (1e6 * 1e4 * 264)));
    CHECK(energy_reservation(p) == doctest::Approx(0.000805).epsilon(0.001));
    double prev = 1;
    for (int n_bc = 264; n_bc <= 264 * 1024; n_bc *= 4) {
      p.n_bc = n_bc;
      p.n_channels = n_bc;
      CHECK(energy_reservation(p) < prev);
      prev = energy_reservation(p);
    }
    CHECK(prev < 1e-6);
  }

  TEST_CASE("pointing loss") {
    CHECK(pointing_loss(1.0, 2.0) == 3.0);
    CHECK(pointing_loss(0.0, 2.0) == 0.0);
    CHECK(pointing_loss(2.0, 2.0) == 12.0);
  }

  TEST_CASE("steering interval") {
    CHECK(max_steer_interval(2, 0.73, 3, SteerStatistic::max) == doctest::Approx(2 / 0.73));
    CHECK(max_steer_interval(2, 0.73, 3, SteerStatistic::max) == doctest::Approx(2.74).epsilon(0.002));
    CHECK(max_steer_interval(2, 0.73, 0, SteerStatistic::mean) == 0);
    // pointing is centered on the interval, so the worst error is half the drift
    const double t = max_steer_interval(2, 0.73, 0.5, SteerStatistic::max);
    CHECK(pointing_loss(0.73 * t / 2, 2) == doctest::Approx(0.5));
  }

  TEST_CASE("Shannon sensitivity agrees with a finite difference") {
    // d/dSNR_dB log2(1 + 10^(x/10)) at high SNR
    auto se = [](double db) { return std::log2(1 + std::pow(10.0, db / 10)); };
    const double x = 40, h = 1e-3;
    CHECK((se(x + h) - se(x - h)) / (2 * h) == doctest::Approx(shannon_sensitivity_per_db()).epsilon(1e-3));
    CHECK(shannon_sensitivity_per_db() == doctest::Approx(0.332).epsilon(0.001));
  }

  TEST_CASE("260 ms steering interval for a 0.1% throughput budget") {
    const double budget = loss_budget_db(0.001, 2.29);
    CHECK(budget == doctest::Approx(0.0069).epsilon(0.01));
    const double t = max_steer_interval(2, 0.73, budget, SteerStatistic::mean);
    CHECK(t == doctest::Approx(0.260).epsilon(0.15));
  }

  TEST_CASE("displaced steering loss is below one part per million") {
    const double v = displaced_steering_loss(baseline());
    CHECK(v > 0);
    CHECK(v < 1e-6);
  }

  TEST_CASE("uplink cost") {
    CostParams p = baseline();
    const auto u = cnc_uplink_cost(p);
    CHECK(u.total_mib <= 54);
    CHECK(u.total_mib == doctest::Approx(53.8).epsilon(0.002));
    CHECK(u.per_sv_bps == doctest::Approx(3500).epsilon(0.05));
    p.timing.n = 1;
    CHECK(cnc_uplink_cost(p).total_bits == p.n_cells * 59);
  }

  TEST_CASE("terminal duty cycle") {
    CostParams p = baseline();
    CHECK(ut_duty_cost(p.timing) == doctest::Approx(0.0033));
    const auto d = ut_duty_bounds(p);
    CHECK(d.d_ul_max == doctest::Approx(0.9967));
    CHECK(d.d_dl_mean_max == doctest::Approx(0.984).epsilon(0.001));
    CHECK(d.d_dl_max == doctest::Approx(0.9997).epsilon(1e-4));
    p.timing.n = 0;
    CHECK(ut_duty_cost(p.timing) == 0);
  }

  TEST_CASE("duty budget") {
    CHECK_NOTHROW(check_duty_budget(0.5, 0.4, 0.05, 0.0467, 0.0033));
    CHECK_THROWS_AS(check_duty_budget(0.5, 0.5, 0.05, 0.0467, 0.0033), ParameterError);
    CHECK_THROWS_AS(check_duty_budget(-0.1, 1.0967, 0.0, 0.0, 0.0033), ParameterError);
  }

  TEST_CASE("complexity bound at the baseline") {
    const CostReport r = cost_report(baseline());
    CHECK(r.complexity_steps == doctest::Approx(4.4e6).epsilon(0.02));
  }

  TEST_CASE("n = 0 makes every fused reservation zero") {
    CostParams p = baseline();
    p.timing.n = 0;
    const CostReport r = cost_report(p);
    CHECK(r.r_tx == 0);
    CHECK(r.r_rx == 0);
    CHECK(r.r_su == 0);
    CHECK(r.r_e == 0);
    CHECK(r.duty.d_pnt == 0);
    CHECK(r.uplink.total_bits == 0);
  }

  TEST_CASE("monotone in n and cell count, antitone in SVs and channels") {
    auto all = [](const CostParams& p) {
      return std::vector<double>{tx_reservation_bound(p), rx_reservation_bound(p), setup_reservation(p),
                                 energy_reservation(p), ut_duty_cost(p.timing)};
    };
    CostParams p = baseline();
    auto prev = all(p);
    for (int n = 0; n <= 12; ++n) {
      p.timing.n = n;
      const auto cur = all(p);
      if (n > 0)
        for (std::size_t i = 0; i < cur.size(); ++i) CHECK(cur[i] >= prev[i]);
      prev = cur;
    }
    p = baseline();
    prev = all(p);
    for (double cells = 1e5; cells <= 1.6e6; cells *= 2) {
      p.n_cells = cells;
      const auto cur = all(p);
      CHECK(cur[0] >= prev[0] * (cells > 1e5));
      CHECK(cur[2] >= prev[2] * (cells > 1e5));
      prev = cur;
    }
    p = baseline();
    double tx = 1, su = 1, e = 1;
    for (double sats = 5e3; sats <= 8e4; sats *= 2) {
      p.n_sats = sats;
      CHECK(tx_reservation_bound(p) <= tx);
      CHECK(setup_reservation(p) <= su);
      CHECK(energy_reservation(p) <= e);
      tx = tx_reservation_bound(p);
      su = setup_reservation(p);
      e = energy_reservation(p);
    }
    p = baseline();
    double rx = 1;
    for (int ch = 20; ch <= 320; ch *= 2) {
      p.n_channels = ch;
      p.n_bc = std::min(264, 15 * ch);
      CHECK(rx_reservation_bound(p) <= rx);
      rx = rx_reservation_bound(p);
    }
  }

  TEST_CASE("fractions stay in [0, 1] or raise saturation") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    int saturated = 0, ok = 0;
    for (int i = 0; i < 2000; ++i) {
      CostParams p = baseline();
      p.timing.n = 4 + static_cast<int>(u(rng) * 40);
      p.n_cells = 1e3 + u(rng) * 5e7;
      p.n_sats = 10 + u(rng) * 2e4;
      p.timing.setup_tx = static_cast<Micros>(u(rng) * 50'000);
      p.par = 1 + u(rng) * 50;
      try {
        const CostReport r = cost_report(p);
        for (double v : {r.r_tx, r.r_rx, r.r_su, r.r_e, r.duty.d_pnt, r.downlink.r_dl}) {
          CHECK(v >= 0);
          CHECK(v <= 1);
        }
        ++ok;
      } catch (const SaturationError&) {
        ++saturated;
      }
    }
    CHECK(ok > 0);
    CHECK(saturated > 0);
  }

  TEST_CASE("saturation is an error") {
    CostParams p = baseline();
    p.n_sats = 100;
    CHECK_THROWS_AS(tx_reservation_bound(p), SaturationError);
    CHECK_THROWS_AS(cost_report(p), SaturationError);
  }

  TEST_CASE("invalid parameters") {
    CostParams p = baseline();
    p.par = 0.5;
    CHECK_THROWS_AS(tx_reservation_bound(p), ParameterError);
    p = baseline();
    p.timing.n = -1;
    CHECK_THROWS_AS(tx_reservation_bound(p), ParameterError);
  }

  TEST_CASE("measured reservations of an empty schedule") {
    const CostParams p = desk();
    const TxCube tx(p.timing.period, BeamChannelLayout(15, 76, 264), 400);
    const RxCube rx(p.timing.period, 2000, 76);
    const auto m = measure_reservations(GnssSchedule{}, tx, rx, p);
    CHECK(m.r_tx == 0);
    CHECK(m.r_rx == 0);
    CHECK(m.r_su == 0);
    CHECK(m.r_e == 0);
  }

  TEST_CASE("primary-only schedule has no set-up reservation") {
    const CostParams p = desk();
    GnssSchedule s;
    for (int c = 0; c < 10; ++c) {
      Assignment a;
      a.cell_id = c;
      a.kind = AssignmentKind::primary;
      s.assignments.push_back(a);
    }
    const TxCube tx(p.timing.period, BeamChannelLayout(15, 76, 264), 400);
    const RxCube rx(p.timing.period, 2000, 76);
    const auto m = measure_reservations(s, tx, rx, p);
    CHECK(m.r_su == 0);
    CHECK(m.r_e > 0);
  }

  TEST_CASE("report serialization") {
    CostReport r = cost_report(baseline());
    const auto j = to_json(r);
    CHECK(j.at("r_tx").get<double>() == r.r_tx);
    CHECK(j.at("displaced_steering_loss_approximate").get<bool>());
    CHECK(csv_header(r).size() == csv_row(r).size());
    r.measured = MeasuredReservations{0.01, 0.0002, 0.1, 0.007};
    CHECK(csv_header(r).size() == csv_row(r).size());
    CHECK(to_json(r).contains("r_tx_meas"));
  }
}
