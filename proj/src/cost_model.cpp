#include "fusedleo/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fusedleo/errors.hpp"
#include "fusedleo/scheduler.hpp"

namespace fusedleo {

void CostParams::validate() const {
  const auto& t = timing;
  if (t.burst < 0 || t.switch_tx < 0 || t.switch_rx < 0 || t.setup_tx < 0 || t.setup_rx < 0)
    throw ParameterError("cost: durations must be >= 0");
  if (t.period <= 0) throw ParameterError("cost: period must be > 0");
  if (t.n < 0) throw ParameterError("cost: n must be >= 0");
  if (n_cells < 0 || n_adj < 0 || t_sweep_us < 0) throw ParameterError("cost: n_cells, n_adj and T_sweep must be >= 0");
  if (n_sats <= 0 || n_beams <= 0 || n_channels <= 0 || n_bc <= 0)
    throw ParameterError("cost: SV, beam, channel and beam-channel counts must be > 0");
  if (par < 1) throw ParameterError("cost: PAR must be >= 1");
  if (channel_bandwidth_hz <= 0 || spectral_efficiency <= 0 || assignment_bits <= 0)
    throw ParameterError("cost: channel rate and assignment size must be > 0");
  if (fwhm_deg <= 0 || omega_deg_s <= 0) throw ParameterError("cost: FWHM and omega must be > 0");
  if (throughput_loss_budget < 0 || refresh_s <= 0 || correction_stream_bps < 0 || ionosphere_stream_bps < 0)
    throw ParameterError("cost: loss budget, refresh cadence and stream rates out of range");
}

CostParams CostParams::baseline() {
  CostParams p;
  p.t_sweep_us = sweep_time(GridParams{}) * 1e6;
  return p;
}

CostParams CostParams::from(const GridParams& grid, double n_cells, const ConstellationConfig& config,
                            const TimingParams& timing) {
  CostParams p;
  p.timing = timing;
  p.n_cells = n_cells;
  p.n_sats = config.n_sats();
  p.n_beams = config.n_beams;
  p.n_channels = config.n_channels;
  p.n_bc = config.n_bc;
  p.t_sweep_us = sweep_time(grid) * 1e6;
  return p;
}

namespace {

double fraction(double value, const char* what) {
  if (!(value <= 1.0)) throw SaturationError(std::string(what) + " exceeds 100% (" + std::to_string(value) + ")");
  return value;
}

double primaries(const CostParams& p) { return std::min(p.timing.n, 1) * p.n_cells; }
double secondaries(const CostParams& p) { return std::max(p.timing.n - 1, 0) * p.n_cells; }

// Shared by the bounds and the measurements so that a complete schedule
// reproduces its bound bit for bit.
double tx_fraction(double primary_time, double whole_beam_time, const CostParams& p) {
  const double num = primary_time * p.n_beams + whole_beam_time * p.n_bc;
  const double den = static_cast<double>(p.n_beams) * p.n_bc * p.n_sats * static_cast<double>(p.timing.period);
  return num / den;
}

double su_fraction(double secondary_count, const CostParams& p) {
  return secondary_count * static_cast<double>(p.timing.setup_tx) /
         (p.n_beams * p.n_sats * static_cast<double>(p.timing.period));
}

double e_fraction(double burst_count, const CostParams& p) {
  return burst_count * static_cast<double>(p.timing.burst) * p.par /
         (static_cast<double>(p.timing.period) * p.n_sats * p.n_bc);
}

}  // namespace

double tx_reservation_bound(const CostParams& p) {
  p.validate();
  const auto& t = p.timing;
  const double primary_time = primaries(p) * static_cast<double>(t.burst);
  const double whole_time = secondaries(p) * static_cast<double>(t.burst + 2 * t.switch_tx);
  return fraction(tx_fraction(primary_time, whole_time, p), "R_TX");
}

double rx_reservation_bound(const CostParams& p) {
  p.validate();
  const auto& t = p.timing;
  const double n = t.n;
  const double num = n * (p.n_adj + 1) * (static_cast<double>(t.burst) + p.t_sweep_us) +
                     2.0 * std::max(n - 1, 0.0) * static_cast<double>(t.switch_rx);
  return fraction(num / (p.n_channels * static_cast<double>(t.period)), "R_RX");
}

double setup_reservation(const CostParams& p) {
  p.validate();
  return fraction(su_fraction(secondaries(p), p), "R_SU");
}

double energy_reservation(const CostParams& p) {
  p.validate();
  return fraction(e_fraction(p.timing.n * p.n_cells, p), "R_E");
}

double downlink_channels(const CostParams& p, bool with_fusion) {
  const double v_tx = static_cast<double>(p.n_bc) * p.n_sats;
  const double v_rx = p.n_cells * p.n_channels;
  if (!with_fusion) return std::min(v_tx, v_rx);
  return std::min(v_tx * (1 - tx_reservation_bound(p)), v_rx * (1 - rx_reservation_bound(p)));
}

DownlinkCapacity downlink_capacity(const CostParams& p) {
  DownlinkCapacity d;
  d.channels_before = downlink_channels(p, false);
  d.channels_after = downlink_channels(p, true);
  d.bps_before = d.channels_before * p.channel_rate_bps();
  d.bps_after = d.channels_after * p.channel_rate_bps();
  d.r_dl = d.channels_before > 0 ? (d.channels_before - d.channels_after) / d.channels_before : 0.0;
  d.per_cell_loss_bps = p.n_cells > 0 ? d.r_dl * d.bps_before / p.n_cells : 0.0;
  return d;
}

double max_steer_interval(double fwhm_deg, double omega_deg_s, double loss_budget_db, SteerStatistic stat) {
  if (fwhm_deg <= 0 || omega_deg_s <= 0) throw ParameterError("steering: FWHM and omega must be > 0");
  if (loss_budget_db < 0) throw ParameterError("steering: loss budget must be >= 0");
  const double reference_db = stat == SteerStatistic::max ? 3.0 : 1.0;
  return fwhm_deg / omega_deg_s * std::sqrt(loss_budget_db / reference_db);
}

double pointing_loss(double delta_theta_deg, double fwhm_deg) {
  if (fwhm_deg <= 0) throw ParameterError("pointing loss: FWHM must be > 0");
  const double r = delta_theta_deg / fwhm_deg;
  return 12.0 * r * r;
}

double shannon_sensitivity_per_db() { return std::log2(10.0) / 10.0; }

double loss_budget_db(double throughput_fraction, double spectral_efficiency) {
  if (throughput_fraction < 0 || spectral_efficiency <= 0) throw ParameterError("loss budget: bad arguments");
  return throughput_fraction * spectral_efficiency / shannon_sensitivity_per_db();
}

double displaced_steering_loss(const CostParams& p) {
  // A displaced update leaves the beam drifting for one more T_setup.
  const double drift_deg = p.omega_deg_s * static_cast<double>(p.timing.setup_tx) * 1e-6;
  return setup_reservation(p) * pointing_loss(drift_deg, p.fwhm_deg) * shannon_sensitivity_per_db() /
         p.spectral_efficiency;
}

UplinkCost cnc_uplink_cost(const CostParams& p) {
  p.validate();
  UplinkCost u;
  const double tuples = std::max(2.0 * p.timing.n - 1.0, 0.0) * p.n_cells;
  u.total_bits = tuples * p.assignment_bits;
  u.total_bytes = u.total_bits / 8.0;
  u.total_mib = u.total_bytes / (1024.0 * 1024.0);
  u.per_sv_bps = u.total_bits / p.n_sats / p.refresh_s + p.correction_stream_bps + p.ionosphere_stream_bps;
  return u;
}

double ut_duty_cost(const TimingParams& t) {
  if (t.period <= 0 || t.n < 0) throw ParameterError("duty cycle: bad timing");
  const double num = static_cast<double>(t.n) * static_cast<double>(t.burst) +
                     2.0 * std::max(t.n - 1, 0) * static_cast<double>(t.switch_rx);
  return fraction(num / static_cast<double>(t.period), "d_PNT");
}

DutyCycle ut_duty_bounds(const CostParams& p) {
  DutyCycle d;
  d.d_pnt = ut_duty_cost(p.timing);
  d.d_dl_max = 1.0 - rx_reservation_bound(p);
  d.d_dl_mean_max = 1.0 - downlink_capacity(p).r_dl;
  d.d_ul_max = 1.0 - d.d_pnt;
  return d;
}

void check_duty_budget(double d_ul, double d_dl, double d_switch, double d_idle, double d_pnt) {
  for (double d : {d_ul, d_dl, d_switch, d_idle, d_pnt})
    if (d < 0) throw ParameterError("duty cycle: negative share");
  const double total = d_ul + d_dl + d_switch + d_idle + d_pnt;
  if (std::abs(total - 1.0) > 1e-9)
    throw ParameterError("duty cycle: shares sum to " + std::to_string(total * 100) + "%, not 100%");
}

MeasuredReservations measure_reservations(const GnssSchedule& schedule, const TxCube& tx, const RxCube& rx,
                                          const CostParams& p) {
  p.validate();
  double n_secondary = 0;
  for (const auto& a : schedule.assignments)
    if (a.kind == AssignmentKind::secondary) ++n_secondary;
  MeasuredReservations m;
  m.r_tx = fraction(tx.occupancy(), "measured R_TX");
  m.r_rx = fraction(rx.occupancy(), "measured R_RX");
  m.r_su = fraction(su_fraction(n_secondary, p), "measured R_SU");
  m.r_e = fraction(e_fraction(static_cast<double>(schedule.assignments.size()), p), "measured R_E");
  return m;
}

CostReport cost_report(const CostParams& p) {
  p.validate();
  CostReport r;
  r.params = p;
  r.r_tx = tx_reservation_bound(p);
  r.r_rx = rx_reservation_bound(p);
  r.downlink = downlink_capacity(p);
  r.r_su = setup_reservation(p);
  r.r_e = energy_reservation(p);
  r.complexity_steps = complexity_bound(p.timing.n, p.n_cells, r.r_tx, r.r_rx);
  r.uplink = cnc_uplink_cost(p);
  r.duty = ut_duty_bounds(p);
  r.steer_loss_budget_db = loss_budget_db(p.throughput_loss_budget, p.spectral_efficiency);
  r.t_steer_max_s = max_steer_interval(p.fwhm_deg, p.omega_deg_s, r.steer_loss_budget_db, SteerStatistic::mean);
  r.t_steer_peak_s = max_steer_interval(p.fwhm_deg, p.omega_deg_s, r.steer_loss_budget_db, SteerStatistic::max);
  r.displaced_steering_loss = displaced_steering_loss(p);
  return r;
}

namespace {

std::vector<std::pair<std::string, double>> flat(const CostReport& r) {
  const auto& p = r.params;
  std::vector<std::pair<std::string, double>> f{
      {"n", p.timing.n},
      {"n_cells", p.n_cells},
      {"n_sats", p.n_sats},
      {"n_beams", p.n_beams},
      {"n_channels", p.n_channels},
      {"n_bc", p.n_bc},
      {"n_adj", p.n_adj},
      {"t_burst_us", static_cast<double>(p.timing.burst)},
      {"t_switch_tx_us", static_cast<double>(p.timing.switch_tx)},
      {"t_switch_rx_us", static_cast<double>(p.timing.switch_rx)},
      {"t_setup_tx_us", static_cast<double>(p.timing.setup_tx)},
      {"t_period_us", static_cast<double>(p.timing.period)},
      {"t_sweep_us", p.t_sweep_us},
      {"par", p.par},
      {"r_tx", r.r_tx},
      {"r_rx", r.r_rx},
      {"r_dl", r.downlink.r_dl},
      {"dl_channels_before", r.downlink.channels_before},
      {"dl_channels_after", r.downlink.channels_after},
      {"dl_bps_before", r.downlink.bps_before},
      {"dl_bps_after", r.downlink.bps_after},
      {"per_cell_loss_bps", r.downlink.per_cell_loss_bps},
      {"r_su", r.r_su},
      {"r_e", r.r_e},
      {"complexity_steps", r.complexity_steps},
      {"c_au_bits", r.uplink.total_bits},
      {"c_au_mib", r.uplink.total_mib},
      {"per_sv_uplink_bps", r.uplink.per_sv_bps},
      {"d_pnt", r.duty.d_pnt},
      {"d_dl_max", r.duty.d_dl_max},
      {"d_dl_mean_max", r.duty.d_dl_mean_max},
      {"d_ul_max", r.duty.d_ul_max},
      {"steer_loss_budget_db", r.steer_loss_budget_db},
      {"t_steer_max_s", r.t_steer_max_s},
      {"t_steer_peak_s", r.t_steer_peak_s},
      {"displaced_steering_loss", r.displaced_steering_loss},
  };
  if (r.measured) {
    f.emplace_back("r_tx_meas", r.measured->r_tx);
    f.emplace_back("r_rx_meas", r.measured->r_rx);
    f.emplace_back("r_su_meas", r.measured->r_su);
    f.emplace_back("r_e_meas", r.measured->r_e);
  }
  return f;
}

std::string format(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

nlohmann::json to_json(const CostReport& r) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : flat(r)) j[k] = v;
  j["displaced_steering_loss_approximate"] = true;
  return j;
}

std::vector<std::string> csv_header(const CostReport& r) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : flat(r)) keys.push_back(k);
  return keys;
}

std::vector<std::string> csv_row(const CostReport& r) {
  std::vector<std::string> cells;
  for (const auto& [k, v] : flat(r)) cells.push_back(format(v));
  return cells;
}

}  // namespace fusedleo
