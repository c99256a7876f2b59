#include "fusedleo/app.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "fusedleo/errors.hpp"
#include "fusedleo/feasibility.hpp"
#include "fusedleo/schedule_io.hpp"

namespace fusedleo {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const GeometryError*>(&e) || dynamic_cast<const OutOfBandError*>(&e)) return kExitGeometry;
  if (dynamic_cast<const Error*>(&e)) return kExitParse;
  return kExitFailure;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"cell_diameter_km", "lat_max_deg", "earth_radius_km", "min_elevation_deg"}},
      {"constellation", {"n_beams", "n_channels", "n_bc", "geo_mask_halfwidth_deg", "goal_elevation_deg"}},
      {"shell",
       {"altitude_km", "inclination_deg", "n_planes", "sats_per_plane", "raan_spread_deg", "phase_offset_deg"}},
      {"timing", {"burst_us", "switch_tx_us", "switch_rx_us", "setup_tx_us", "setup_rx_us", "period_us", "n"}},
      {"cost",
       {"n_cells", "n_sats", "n_adj", "par", "channel_bandwidth_hz", "spectral_efficiency", "assignment_bits",
        "fwhm_deg", "omega_deg_s", "throughput_loss_budget", "refresh_s", "correction_stream_bps",
        "ionosphere_stream_bps"}},
      {"population",
       {"raster", "reference_raster", "synth", "synth_cellsize_deg", "synth_density", "synth_background",
        "hotspot_lat_deg", "hotspot_lon_deg", "hotspot_radius_km", "target_unserved_population", "gamma", "rho_max",
        "altitude_km", "inclination_deg", "phi0_deg", "n_orbit_samples", "seed", "peak_percentile"}},
      {"scheduler", {"mode", "seed", "max_attempts_per_signal", "epoch_s", "order"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string section_kind(const std::string& name) {
  if (name.rfind("shell_", 0) == 0) return "shell";
  return name;
}

template <class T>
T read(const pt::ptree& section, const std::string& section_name, const std::string& key, T fallback) {
  auto v = section.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream in(*v);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof())
    throw ParseError(section_name + "." + key + ": cannot parse '" + *v + "'");
  return out;
}

std::string read_string(const pt::ptree& section, const std::string& key, const std::string& fallback) {
  return section.get<std::string>(key, fallback);
}

void check_keys(const pt::ptree& tree) {
  for (const auto& [name, section] : tree) {
    const auto kind = section_kind(name);
    auto found = known_keys().find(kind);
    if (found == known_keys().end()) throw ParseError("unknown scenario section [" + name + "]");
    if (kind == "shell") {
      const auto suffix = name.substr(6);
      if (suffix.empty() || suffix.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("shell sections are named [shell_<number>], got [" + name + "]");
    }
    for (const auto& [key, value] : section) {
      if (!found->second.count(key)) throw ParseError("unknown scenario key " + name + "." + key);
      if (!value.empty()) throw ParseError("nested value under " + name + "." + key);
    }
  }
}

std::vector<ShellConfig> default_shells() {
  ShellConfig a;
  a.altitude_km = 550;
  a.inclination_deg = 53;
  a.n_planes = 100;
  a.sats_per_plane = 50;
  ShellConfig b = a;
  b.altitude_km = 560;
  b.inclination_deg = 70;
  return {a, b};
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

pt::ptree read_scenario_tree(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("scenario: " + e.message(), static_cast<int>(e.line()));
  }
  check_keys(tree);
  return tree;
}

pt::ptree load_scenario_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario '" + path + "'");
  return read_scenario_tree(in);
}

Scenario scenario_from_tree(const pt::ptree& tree, const std::string& base_dir) {
  check_keys(tree);
  Scenario s;
  const pt::ptree empty;
  auto section = [&](const std::string& name) -> const pt::ptree& {
    auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  const auto& g = section("grid");
  s.grid.cell_diameter_km = read(g, "grid", "cell_diameter_km", s.grid.cell_diameter_km);
  s.grid.lat_max_deg = read(g, "grid", "lat_max_deg", s.grid.lat_max_deg);
  s.grid.earth_radius_km = read(g, "grid", "earth_radius_km", s.grid.earth_radius_km);
  s.grid.min_elevation_deg = read(g, "grid", "min_elevation_deg", s.grid.min_elevation_deg);

  const auto& c = section("constellation");
  s.constellation.n_beams = read(c, "constellation", "n_beams", s.constellation.n_beams);
  s.constellation.n_channels = read(c, "constellation", "n_channels", s.constellation.n_channels);
  s.constellation.n_bc = read(c, "constellation", "n_bc", s.constellation.n_bc);
  s.visibility.geo_mask_halfwidth_deg =
      read(c, "constellation", "geo_mask_halfwidth_deg", s.visibility.geo_mask_halfwidth_deg);
  s.visibility.goal_elevation_deg = read(c, "constellation", "goal_elevation_deg", s.visibility.goal_elevation_deg);

  std::map<int, ShellConfig> shells;
  for (const auto& [name, sec] : tree) {
    if (section_kind(name) != "shell") continue;
    ShellConfig sh;
    sh.altitude_km = read(sec, name, "altitude_km", sh.altitude_km);
    sh.inclination_deg = read(sec, name, "inclination_deg", sh.inclination_deg);
    sh.n_planes = read(sec, name, "n_planes", sh.n_planes);
    sh.sats_per_plane = read(sec, name, "sats_per_plane", sh.sats_per_plane);
    sh.raan_spread_deg = read(sec, name, "raan_spread_deg", sh.raan_spread_deg);
    sh.phase_offset_deg = read(sec, name, "phase_offset_deg", sh.phase_offset_deg);
    shells[std::stoi(name.substr(6))] = sh;
  }
  if (shells.empty())
    s.constellation.shells = default_shells();
  else
    for (const auto& [k, sh] : shells) s.constellation.shells.push_back(sh);

  const auto& t = section("timing");
  s.timing.burst = read(t, "timing", "burst_us", s.timing.burst);
  s.timing.switch_tx = read(t, "timing", "switch_tx_us", s.timing.switch_tx);
  s.timing.switch_rx = read(t, "timing", "switch_rx_us", s.timing.switch_rx);
  s.timing.setup_tx = read(t, "timing", "setup_tx_us", s.timing.setup_tx);
  s.timing.setup_rx = read(t, "timing", "setup_rx_us", s.timing.setup_rx);
  s.timing.period = read(t, "timing", "period_us", s.timing.period);
  s.timing.n = read(t, "timing", "n", s.timing.n);

  const auto& k = section("cost");
  auto& b = s.cost.base;
  s.cost.n_cells = read(k, "cost", "n_cells", s.cost.n_cells);
  if (k.get_optional<std::string>("n_sats")) s.cost.n_sats = read(k, "cost", "n_sats", 0.0);
  s.cost.n_adj = read(k, "cost", "n_adj", s.cost.n_adj);
  b.par = read(k, "cost", "par", b.par);
  b.channel_bandwidth_hz = read(k, "cost", "channel_bandwidth_hz", b.channel_bandwidth_hz);
  b.spectral_efficiency = read(k, "cost", "spectral_efficiency", b.spectral_efficiency);
  b.assignment_bits = read(k, "cost", "assignment_bits", b.assignment_bits);
  b.fwhm_deg = read(k, "cost", "fwhm_deg", b.fwhm_deg);
  b.omega_deg_s = read(k, "cost", "omega_deg_s", b.omega_deg_s);
  b.throughput_loss_budget = read(k, "cost", "throughput_loss_budget", b.throughput_loss_budget);
  b.refresh_s = read(k, "cost", "refresh_s", b.refresh_s);
  b.correction_stream_bps = read(k, "cost", "correction_stream_bps", b.correction_stream_bps);
  b.ionosphere_stream_bps = read(k, "cost", "ionosphere_stream_bps", b.ionosphere_stream_bps);

  const auto& p = section("population");
  auto& pp = s.population;
  auto& src = s.population_source;
  src.raster = resolve(read_string(p, "raster", ""), base_dir);
  src.reference_raster = resolve(read_string(p, "reference_raster", ""), base_dir);
  const auto synth = read_string(p, "synth", "uniform");
  if (synth == "uniform")
    src.synth.kind = SynthSpec::Kind::uniform;
  else if (synth == "hotspot")
    src.synth.kind = SynthSpec::Kind::hotspot;
  else
    throw ParseError("population.synth: expected uniform or hotspot, got '" + synth + "'");
  src.synth.cellsize_deg = read(p, "population", "synth_cellsize_deg", src.synth.cellsize_deg);
  src.synth.density = read(p, "population", "synth_density", src.synth.density);
  src.synth.background = read(p, "population", "synth_background", src.synth.background);
  src.synth.hotspot_center.lat_deg = read(p, "population", "hotspot_lat_deg", 0.0);
  src.synth.hotspot_center.lon_deg = read(p, "population", "hotspot_lon_deg", 0.0);
  src.synth.hotspot_radius_km = read(p, "population", "hotspot_radius_km", src.synth.hotspot_radius_km);
  pp.target_unserved_population = read(p, "population", "target_unserved_population", pp.target_unserved_population);
  pp.gamma = read(p, "population", "gamma", pp.gamma);
  if (p.get_optional<std::string>("rho_max")) pp.rho_max = read(p, "population", "rho_max", 0.0);
  pp.altitude_km = read(p, "population", "altitude_km", pp.altitude_km);
  pp.inclination_deg = read(p, "population", "inclination_deg", pp.inclination_deg);
  pp.phi0_deg = read(p, "population", "phi0_deg", s.grid.min_elevation_deg);
  pp.n_orbit_samples = read(p, "population", "n_orbit_samples", pp.n_orbit_samples);
  pp.rng_seed = read(p, "population", "seed", pp.rng_seed);
  pp.peak_percentile = read(p, "population", "peak_percentile", pp.peak_percentile);

  const auto& sc = section("scheduler");
  s.scheduler.mode = parse_scheduler_mode(read_string(sc, "mode", "greedy"));
  s.scheduler.rng_seed = read(sc, "scheduler", "seed", s.scheduler.rng_seed);
  s.scheduler.max_attempts_per_signal =
      read(sc, "scheduler", "max_attempts_per_signal", s.scheduler.max_attempts_per_signal);
  s.scheduler.epoch_s = read(sc, "scheduler", "epoch_s", s.scheduler.epoch_s);
  s.scheduler.order = parse_cell_order(read_string(sc, "order", "id"));
  s.scheduler.visibility = s.visibility;

  s.output_dir = read_string(section("output"), "dir", s.output_dir);

  try {
    s.grid.validate();
    s.constellation.validate();
    s.scheduler.validate();
    s.population.validate();
    s.cost_params().validate();
  } catch (const ParameterError& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  const auto dir = fs::path(path).parent_path().string();
  return scenario_from_tree(load_scenario_tree(path), dir.empty() ? "." : dir);
}

CostParams Scenario::cost_params() const {
  CostParams p = cost.base;
  p.timing = timing;
  p.n_cells = cost.n_cells;
  p.n_adj = cost.n_adj;
  p.n_sats = cost.n_sats ? *cost.n_sats : constellation.n_sats();
  p.n_beams = constellation.n_beams;
  p.n_channels = constellation.n_channels;
  p.n_bc = constellation.n_bc;
  p.t_sweep_us = sweep_time(grid) * 1e6;
  return p;
}

SweepAxis parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw ParseError("--sweep expects key=a,b,c, got '" + text + "'");
  SweepAxis axis;
  axis.key = text.substr(0, eq);
  std::istringstream values(text.substr(eq + 1));
  std::string v;
  while (std::getline(values, v, ','))
    if (!v.empty()) axis.values.push_back(v);
  if (axis.values.empty()) throw ParseError("--sweep " + axis.key + ": no values");
  return axis;
}

namespace {

std::string qualify(const std::string& key) {
  if (key.find('.') != std::string::npos) {
    const auto section = key.substr(0, key.find('.'));
    const auto name = key.substr(key.find('.') + 1);
    auto found = known_keys().find(section_kind(section));
    if (found == known_keys().end() || !found->second.count(name)) throw ParseError("--sweep: unknown key " + key);
    return key;
  }
  std::string match;
  for (const auto& [section, keys] : known_keys()) {
    if (section == "shell" || !keys.count(key)) continue;
    if (!match.empty()) throw ParseError("--sweep: key '" + key + "' is ambiguous, qualify it with its section");
    match = section + "." + key;
  }
  if (match.empty()) throw ParseError("--sweep: unknown key " + key);
  return match;
}

}  // namespace

std::vector<pt::ptree> expand_sweep(const pt::ptree& base, const std::vector<SweepAxis>& axes) {
  std::vector<pt::ptree> out{base};
  for (const auto& axis : axes) {
    const auto key = qualify(axis.key);
    std::vector<pt::ptree> next;
    for (const auto& tree : out)
      for (const auto& v : axis.values) {
        pt::ptree t = tree;
        t.put(pt::ptree::path_type(key, '.'), v);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

namespace {

std::string output_dir(const CommandOptions& opt, const Scenario& s) {
  const auto dir = opt.out_dir.empty() ? s.output_dir : opt.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

void write_file(const std::string& path, const std::string& content, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  return line + "\n";
}

Scenario scenario_for(const CommandOptions& opt) {
  if (opt.scenario_path.empty()) throw ParseError("--scenario is required");
  Scenario s = load_scenario(opt.scenario_path);
  if (opt.seed) s.scheduler.rng_seed = *opt.seed;
  if (opt.order) s.scheduler.order = *opt.order;
  if (opt.mode) s.scheduler.mode = *opt.mode;
  return s;
}

std::string percent(double v, int digits = 3) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v * 100 << "%";
  return out.str();
}

}  // namespace

int cmd_cost(const CommandOptions& opt, std::ostream& log) {
  if (opt.scenario_path.empty()) throw ParseError("--scenario is required");
  const auto base_dir = fs::path(opt.scenario_path).parent_path().string();
  const auto trees = expand_sweep(load_scenario_tree(opt.scenario_path), opt.sweep);

  nlohmann::json reports = nlohmann::json::array();
  std::string csv;
  std::string dir;
  for (const auto& tree : trees) {
    Scenario s = scenario_from_tree(tree, base_dir.empty() ? "." : base_dir);
    if (dir.empty()) dir = output_dir(opt, s);
    const CostReport r = cost_report(s.cost_params());
    nlohmann::json j = to_json(r);
    std::vector<std::string> head, row;
    for (const auto& axis : opt.sweep) {
      const auto key = qualify(axis.key);
      const auto value = tree.get<std::string>(pt::ptree::path_type(key, '.'));
      j["sweep"][key] = value;
      head.push_back(key);
      row.push_back(value);
    }
    reports.push_back(std::move(j));
    if (csv.empty()) {
      auto h = csv_header(r);
      head.insert(head.end(), h.begin(), h.end());
      csv = join(head);
    }
    auto cells = csv_row(r);
    row.insert(row.end(), cells.begin(), cells.end());
    csv += join(row);

    log << "R_TX " << percent(r.r_tx) << "  R_RX " << percent(r.r_rx, 4) << "  R_DL " << percent(r.downlink.r_dl)
        << "  R_SU " << percent(r.r_su) << "  R_E " << percent(r.r_e) << "  d_PNT " << percent(r.duty.d_pnt)
        << "  C_AU " << std::fixed << std::setprecision(1) << r.uplink.total_mib << " MiB\n";
  }
  write_file(dir + "/cost.json", dump(opt.sweep.empty() ? reports.at(0) : reports));
  write_file(dir + "/cost.csv", csv);
  return kExitOk;
}

GnssSchedule load_schedule(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schedule '" + path + "'");
  char first = 0;
  in.get(first);
  if (!in) throw ParseError("schedule file is empty");
  in.unget();
  if (first == '{') {
    try {
      return schedule_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("schedule json: ") + e.what());
    }
  }
  return read_schedule_binary(in);
}

int cmd_schedule(const CommandOptions& opt, std::ostream& log) {
  const Scenario s = scenario_for(opt);
  const auto dir = output_dir(opt, s);
  const auto started = std::chrono::steady_clock::now();

  const CellGrid grid = CellGrid::build(s.grid);
  const auto states = propagate(s.constellation, s.scheduler.epoch_s, s.grid.earth_radius_km);
  ScheduleResult result = s.scheduler.mode == SchedulerMode::greedy
                              ? greedy_schedule(grid, s.constellation, states, s.timing, s.scheduler)
                              : randomized_schedule(grid, s.constellation, states, s.timing, s.scheduler);
  const FeasibilityReport report = check_feasibility(result.schedule, grid, states, s.constellation, s.timing,
                                                     s.visibility.geo_mask_halfwidth_deg);

  CostParams p = s.cost_params();
  p.n_cells = static_cast<double>(grid.size());
  p.n_sats = s.constellation.n_sats();
  CostReport bounds = cost_report(p);
  bounds.measured = measure_reservations(result.schedule, result.tx, result.rx, p);

  write_file(dir + "/schedule.json", dump(to_json(result.schedule)));
  std::ostringstream bin;
  write_schedule_binary(bin, result.schedule);
  write_file(dir + "/schedule.bin", bin.str(), true);
  write_file(dir + "/stats.json", dump(to_json(result.stats)));
  write_file(dir + "/feasibility.json", dump(to_json(report)));
  write_file(dir + "/reservations.json", dump(to_json(bounds)));

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log << to_string(s.scheduler.mode) << " schedule: " << grid.size() << " cells, " << states.size() << " SVs, "
      << result.schedule.assignments.size() << " assignments, " << result.stats.total_steps << " steps, "
      << result.stats.cells_failed.size() << " failed cells, " << report.violations.size() << " violations\n"
      << "R_TX measured " << percent(bounds.measured->r_tx, 4) << " (bound " << percent(bounds.r_tx, 4)
      << "), R_RX measured " << percent(bounds.measured->r_rx, 4) << " (bound " << percent(bounds.r_rx, 4) << ")\n"
      << "wall time " << std::fixed << std::setprecision(2) << wall << " s\n";

  const auto& failed = result.stats.cells_failed;
  for (std::size_t i = 0; i < failed.size() && i < 10; ++i) log << "  " << failed[i].reason << "\n";
  if (failed.size() > 10) log << "  ... " << failed.size() - 10 << " more in stats.json\n";
  if (!result.stats.cells_failed.empty()) {
    const bool visibility = std::any_of(result.stats.cells_failed.begin(), result.stats.cells_failed.end(),
                                        [](const CellFailure& f) { return f.reason.find("usable SVs") != std::string::npos; });
    return visibility ? kExitGeometry : kExitInfeasible;
  }
  return report.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_check(const CommandOptions& opt, std::ostream& log) {
  const Scenario s = scenario_for(opt);
  if (opt.schedule_path.empty()) throw ParseError("--schedule is required");
  const GnssSchedule schedule = load_schedule(opt.schedule_path);
  const CellGrid grid = CellGrid::build(s.grid);
  const auto states = propagate(s.constellation, s.scheduler.epoch_s, s.grid.earth_radius_km);
  const FeasibilityReport report =
      check_feasibility(schedule, grid, states, s.constellation, s.timing, s.visibility.geo_mask_halfwidth_deg);
  const auto dir = output_dir(opt, s);
  write_file(dir + "/feasibility.json", dump(to_json(report)));
  log << report.assignments_checked << " assignments checked, " << report.violations.size() << " violations\n";
  for (int c = 1; c <= kConsistencyConstraint; ++c)
    if (report.count(c)) log << "  constraint " << c << ": " << report.count(c) << "\n";
  return report.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_par(const CommandOptions& opt, std::ostream& log) {
  Scenario s = scenario_for(opt);
  if (opt.seed) s.population.rng_seed = *opt.seed;
  const auto dir = output_dir(opt, s);
  const auto& src = s.population_source;
  const DensityGrid global = src.raster.empty() ? synth_density(src.synth) : load_density_grid(src.raster);
  std::optional<DensityGrid> reference;
  if (!src.reference_raster.empty()) reference = load_density_grid(src.reference_raster);
  const ParReport report = run_par(global, reference ? &*reference : nullptr, s.population);

  nlohmann::json j = to_json(report);
  j["source"] = src.raster.empty() ? "synthetic" : src.raster;
  write_file(dir + "/par.json", dump(j));

  const DensityGrid capped = report.rho_max ? cap_density(global, *report.rho_max) : global;
  const auto counts = visible_subscribers(capped, s.population.altitude_km, s.population.phi0_deg);
  std::ostringstream csv;
  csv << "lat_deg,lon_deg,visible_subscribers\n" << std::setprecision(10);
  for (const auto& t : track_samples(counts, s.population.inclination_deg, s.population.n_orbit_samples,
                                     s.population.rng_seed))
    csv << t.point.lat_deg << ',' << t.point.lon_deg << ',' << t.count << '\n';
  write_file(dir + "/track_samples.csv", csv.str());

  log << "PAR " << std::setprecision(4) << report.estimate.par << " (peak " << report.estimate.peak << ", mean "
      << report.estimate.mean << ", " << report.estimate.samples << " samples)\n";
  return kExitOk;
}

int cmd_grid(const CommandOptions& opt, std::ostream& log) {
  const Scenario s = scenario_for(opt);
  const auto dir = output_dir(opt, s);
  const CellGrid grid = CellGrid::build(s.grid);
  std::ostringstream out;
  grid.write_csv(out);
  write_file(dir + "/cells.csv", out.str());
  log << grid.size() << " cells, mean " << grid.mean_neighbor_count() << " neighbors\n";
  return kExitOk;
}

int cmd_states(const CommandOptions& opt, std::ostream& log) {
  const Scenario s = scenario_for(opt);
  const auto dir = output_dir(opt, s);
  const auto states = propagate(s.constellation, s.scheduler.epoch_s, s.grid.earth_radius_km);
  std::ostringstream out;
  out << "sv_id,t,x,y,z\n" << std::setprecision(12);
  for (const auto& st : states)
    out << st.sv_id << ',' << st.epoch_s << ',' << st.position_km.x() << ',' << st.position_km.y() << ','
        << st.position_km.z() << '\n';
  write_file(dir + "/sv_states.csv", out.str());
  log << states.size() << " SV states at t = " << s.scheduler.epoch_s << " s\n";
  return kExitOk;
}

}  // namespace fusedleo
