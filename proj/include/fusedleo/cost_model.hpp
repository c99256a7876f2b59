#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fusedleo/constellation.hpp"
#include "fusedleo/cubes.hpp"
#include "fusedleo/geo_cells.hpp"
#include "fusedleo/schedule.hpp"

namespace fusedleo {

struct CostParams {
  TimingParams timing;
  double n_cells = 850'000;
  double n_adj = 6;
  double n_sats = 10'000;
  int n_beams = 15;
  int n_channels = 76;
  int n_bc = 264;
  double t_sweep_us = 0.0;  // (D/c)·cos(phi0), not quantized
  double par = 9.6;
  double channel_bandwidth_hz = 50e6;
  double spectral_efficiency = 2.29;  // b/s/Hz; 50 MHz x 2.29 = 114.5 Mbps per channel
  int assignment_bits = 59;
  double fwhm_deg = 2.0;
  double omega_deg_s = 0.73;
  double throughput_loss_budget = 0.001;  // fraction of throughput lost to pointing error
  double refresh_s = 15.0;                // schedule re-upload cadence
  double correction_stream_bps = 600.0;   // precise orbit and clock corrections
  double ionosphere_stream_bps = 3.4;

  // Like TimingParams::validate but allowing zero durations and n = 0, so the
  // closed forms can be evaluated at their degenerate limits.
  void validate() const;

  double channel_rate_bps() const { return channel_bandwidth_hz * spectral_efficiency; }

  static CostParams baseline();
  static CostParams from(const GridParams& grid, double n_cells, const ConstellationConfig& config,
                         const TimingParams& timing);
};

// Reservations as fractions in [0, 1]. Each throws SaturationError rather than
// return a value above 1.
double tx_reservation_bound(const CostParams& p);
double rx_reservation_bound(const CostParams& p);
double setup_reservation(const CostParams& p);
double energy_reservation(const CostParams& p);

struct DownlinkCapacity {
  double channels_before = 0;  // channels' worth of data at once
  double channels_after = 0;
  double bps_before = 0;
  double bps_after = 0;
  double r_dl = 0;               // (before - after) / before
  double per_cell_loss_bps = 0;  // r_dl·before / N_cells
};

/// Channels' worth of simultaneous downlink, with or without fused ranging.
double downlink_channels(const CostParams& p, bool with_fusion);
DownlinkCapacity downlink_capacity(const CostParams& p);

enum class SteerStatistic { max, mean };

/// Longest interval between steering events that keeps the Gaussian pointing
/// loss within `loss_budget_db`, seconds.
double max_steer_interval(double fwhm_deg, double omega_deg_s, double loss_budget_db, SteerStatistic stat);

/// Gaussian-beam pointing loss 12 dB·(delta/FWHM)^2.
double pointing_loss(double delta_theta_deg, double fwhm_deg);

/// Spectral-efficiency change per dB of SNR in the high-SNR Shannon limit,
/// log2(10)/10 b/s/Hz per dB.
double shannon_sensitivity_per_db();

/// SNR loss (dB) that costs `throughput_fraction` of a link running at
/// `spectral_efficiency`, by the high-SNR sensitivity.
double loss_budget_db(double throughput_fraction, double spectral_efficiency);

/// Approximate throughput fraction lost because fused set-up events displace
/// steering updates: R_SU x pointing loss after one T_setup of drift x
/// Shannon sensitivity / spectral efficiency. Not an exact derivation.
double displaced_steering_loss(const CostParams& p);

struct UplinkCost {
  double total_bits = 0;  // (2n-1)·N_cells·assignment_bits, raw payload
  double total_bytes = 0;
  double total_mib = 0;
  double per_sv_bps = 0;  // assignments per refresh plus correction streams
};
UplinkCost cnc_uplink_cost(const CostParams& p);

struct DutyCycle {
  double d_pnt = 0;
  double d_dl_max = 0;       // 1 - R_RX
  double d_dl_mean_max = 0;  // 1 - R_DL
  double d_ul_max = 0;       // 1 - d_PNT
};

/// [n·T_burst + 2(n-1)·T_switch_RX] / T_period.
double ut_duty_cost(const TimingParams& timing);
DutyCycle ut_duty_bounds(const CostParams& p);

/// Half-duplex terminal time budget: the four duty cycles must be
/// non-negative and sum to 100% minus d_PNT. Throws ParameterError otherwise.
void check_duty_budget(double d_ul, double d_dl, double d_switch, double d_idle, double d_pnt);

struct MeasuredReservations {
  double r_tx = 0;
  double r_rx = 0;
  double r_su = 0;
  double r_e = 0;
};

/// Reservations realized by a schedule: TX and RX occupancy from the cubes,
/// set-up from its secondary assignments, energy from its burst count.
MeasuredReservations measure_reservations(const GnssSchedule& schedule, const TxCube& tx, const RxCube& rx,
                                          const CostParams& p);

struct CostReport {
  CostParams params;
  double r_tx = 0;
  double r_rx = 0;
  DownlinkCapacity downlink;
  double r_su = 0;
  double r_e = 0;
  double complexity_steps = 0;
  UplinkCost uplink;
  DutyCycle duty;
  double steer_loss_budget_db = 0;
  double t_steer_max_s = 0;   // mean-loss statistic
  double t_steer_peak_s = 0;  // max-loss statistic
  double displaced_steering_loss = 0;  // approximate
  std::optional<MeasuredReservations> measured;
};

CostReport cost_report(const CostParams& p);

nlohmann::json to_json(const CostReport& r);
/// Column names matching csv_row(r); measured columns appear only when set.
std::vector<std::string> csv_header(const CostReport& r);
std::vector<std::string> csv_row(const CostReport& r);

}  // namespace fusedleo
