#include "fusedleo/population.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "fusedleo/errors.hpp"

namespace fusedleo {

void DensityGrid::validate() const {
  if (ncols < 1 || nrows < 1) throw ParameterError("density grid: ncols and nrows must be >= 1");
  if (!(cellsize_deg > 0)) throw ParameterError("density grid: cellsize must be > 0");
  const double per_half_turn = 180.0 / cellsize_deg;
  if (std::abs(per_half_turn - std::round(per_half_turn)) > 1e-6)
    throw ParameterError("density grid: cellsize must divide 180 degrees evenly");
  if (yll_deg < -90.0 - 1e-9 || yll_deg + nrows * cellsize_deg > 90.0 + 1e-9)
    throw ParameterError("density grid: rows extend beyond the poles");
  if (ncols * cellsize_deg > 360.0 + 1e-9) throw ParameterError("density grid: more than 360 degrees of longitude");
  if (density.size() != static_cast<std::size_t>(ncols) * nrows) throw ParameterError("density grid: size mismatch");
  for (double d : density)
    if (d != nodata && !(d >= 0)) throw ParameterError("density grid: negative density");
}

bool DensityGrid::wraps() const { return std::abs(ncols * cellsize_deg - 360.0) < 1e-9; }

double DensityGrid::cell_area_km2(int row, double radius_km) const {
  const double top = deg2rad(lat_center(row) + cellsize_deg / 2);
  const double bottom = deg2rad(lat_center(row) - cellsize_deg / 2);
  return radius_km * radius_km * deg2rad(cellsize_deg) * (std::sin(top) - std::sin(bottom));
}

double DensityGrid::population(int row, int col, double radius_km) const {
  return valid(row, col) ? value(row, col) * cell_area_km2(row, radius_km) : 0.0;
}

double DensityGrid::total_population(double radius_km) const {
  double total = 0;
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c) total += population(r, c, radius_km);
  return total;
}

DensityGrid read_density_grid(std::istream& in) {
  DensityGrid g;
  std::map<std::string, double> header;
  std::string line;
  int line_no = 0;
  bool have_data_line = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (std::isdigit(static_cast<unsigned char>(key[0])) || key[0] == '-' || key[0] == '+' || key[0] == '.') {
      have_data_line = true;
      break;
    }
    if (key != "ncols" && key != "nrows" && key != "cellsize_deg" && key != "nodata" && key != "xllcorner_deg" &&
        key != "yllcorner_deg")
      throw ParseError("density grid: unknown header key '" + key + "'", line_no);
    double v = 0;
    if (!(ls >> v)) throw ParseError("density grid: header key '" + key + "' has no numeric value", line_no);
    header[key] = v;
  }
  for (const char* k : {"ncols", "nrows", "cellsize_deg", "nodata"})
    if (!header.count(k)) throw ParseError(std::string("density grid: header lacks '") + k + "'", line_no);
  g.ncols = static_cast<int>(header["ncols"]);
  g.nrows = static_cast<int>(header["nrows"]);
  g.cellsize_deg = header["cellsize_deg"];
  g.nodata = header["nodata"];
  if (header.count("xllcorner_deg")) g.xll_deg = header["xllcorner_deg"];
  if (header.count("yllcorner_deg")) g.yll_deg = header["yllcorner_deg"];
  if (g.ncols < 1 || g.nrows < 1) throw ParseError("density grid: ncols and nrows must be >= 1", line_no);

  g.density.reserve(static_cast<std::size_t>(g.ncols) * g.nrows);
  for (int r = 0; r < g.nrows; ++r) {
    if (r > 0 || !have_data_line) {
      if (!std::getline(in, line))
        throw ParseError("density grid: expected " + std::to_string(g.nrows) + " rows, got " + std::to_string(r),
                         line_no);
      ++line_no;
    }
    std::istringstream ls(line);
    double v = 0;
    int count = 0;
    while (ls >> v) {
      g.density.push_back(v);
      ++count;
    }
    if (!ls.eof()) throw ParseError("density grid: non-numeric value", line_no);
    if (count != g.ncols)
      throw ParseError("density grid: row has " + std::to_string(count) + " values, expected " +
                           std::to_string(g.ncols),
                       line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw ParseError("density grid: data after the last row", line_no);
  }
  try {
    g.validate();
  } catch (const ParameterError& e) {
    throw ParseError(e.what());
  }
  return g;
}

DensityGrid load_density_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open density grid '" + path + "'");
  return read_density_grid(in);
}

void write_density_grid(std::ostream& out, const DensityGrid& g) {
  out.precision(17);
  out << "ncols " << g.ncols << "\nnrows " << g.nrows << "\ncellsize_deg " << g.cellsize_deg << "\nnodata "
      << g.nodata << "\nxllcorner_deg " << g.xll_deg << "\nyllcorner_deg " << g.yll_deg << '\n';
  for (int r = 0; r < g.nrows; ++r) {
    for (int c = 0; c < g.ncols; ++c) out << (c ? " " : "") << g.value(r, c);
    out << '\n';
  }
}

DensityGrid synth_density(const SynthSpec& spec) {
  DensityGrid g;
  g.cellsize_deg = spec.cellsize_deg;
  g.ncols = static_cast<int>(std::lround(360.0 / spec.cellsize_deg));
  g.nrows = static_cast<int>(std::lround(180.0 / spec.cellsize_deg));
  g.density.assign(static_cast<std::size_t>(g.ncols) * g.nrows, spec.background);
  for (int r = 0; r < g.nrows; ++r)
    for (int c = 0; c < g.ncols; ++c) {
      const GeoPoint p{g.lat_center(r), g.lon_center(c)};
      double& d = g.value(r, c);
      switch (spec.kind) {
        case SynthSpec::Kind::uniform:
          d = spec.density;
          break;
        case SynthSpec::Kind::hotspot:
          if (central_angle(p, spec.hotspot_center) * kEarthRadiusKm <= spec.hotspot_radius_km) d = spec.density;
          break;
        case SynthSpec::Kind::mixture:
          for (const auto& b : spec.blobs) {
            const double dist = central_angle(p, {b.lat_deg, b.lon_deg}) * kEarthRadiusKm;
            d += b.peak * std::exp(-0.5 * dist * dist / (b.sigma_km * b.sigma_km));
          }
          break;
      }
    }
  g.validate();
  return g;
}

double density_threshold(const DensityGrid& grid, double target, double radius_km) {
  struct Bin {
    double density;
    double people;
  };
  std::vector<Bin> bins;
  double total = 0;
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c)
      if (grid.valid(r, c)) {
        bins.push_back({grid.value(r, c), grid.population(r, c, radius_km)});
        total += bins.back().people;
      }
  if (!(target >= 0)) throw RangeError("density threshold: target must be >= 0");
  if (target >= total) throw RangeError("density threshold: target exceeds the raster's total population");
  std::stable_sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.density < b.density; });
  double cumulative = 0;
  for (const auto& b : bins) {
    cumulative += b.people;
    if (cumulative > target) return b.density;
  }
  return bins.back().density;
}

DensityGrid cap_density(const DensityGrid& grid, double rho_max) {
  if (!(rho_max >= 0)) throw ParameterError("cap: rho_max must be >= 0");
  DensityGrid out = grid;
  for (double& d : out.density)
    if (d != out.nodata) d = std::min(d, rho_max);
  return out;
}

double visibility_cap_angle(double altitude_km, double phi0_deg, double radius_km) {
  if (!(altitude_km > 0)) throw ParameterError("cap angle: altitude must be > 0");
  const double phi0 = deg2rad(phi0_deg);
  return std::acos(radius_km * std::cos(phi0) / (radius_km + altitude_km)) - phi0;
}

DensityGrid visible_subscribers(const DensityGrid& grid, double altitude_km, double phi0_deg, double radius_km) {
  grid.validate();
  const double psi = visibility_cap_angle(altitude_km, phi0_deg, radius_km);
  const int nc = grid.ncols;
  const double dlon = deg2rad(grid.cellsize_deg);

  // Row prefix sums of population, length ncols+1 per row.
  std::vector<double> prefix(static_cast<std::size_t>(grid.nrows) * (nc + 1), 0.0);
  std::vector<double> row_total(static_cast<std::size_t>(grid.nrows), 0.0);
  for (int r = 0; r < grid.nrows; ++r) {
    double* p = &prefix[static_cast<std::size_t>(r) * (nc + 1)];
    for (int c = 0; c < nc; ++c) p[c + 1] = p[c] + grid.population(r, c, radius_km);
    row_total[static_cast<std::size_t>(r)] = p[nc];
  }
  auto range_sum = [&](int r, int lo, int hi) {  // inclusive column range, lo <= hi, within [0, nc)
    const double* p = &prefix[static_cast<std::size_t>(r) * (nc + 1)];
    return p[hi + 1] - p[lo];
  };

  DensityGrid out;
  out.ncols = nc;
  out.nrows = grid.nrows;
  out.cellsize_deg = grid.cellsize_deg;
  out.xll_deg = grid.xll_deg;
  out.yll_deg = grid.yll_deg;
  out.nodata = -1.0;
  out.density.assign(grid.density.size(), 0.0);

  const double psi_deg = rad2deg(psi);
  for (int r0 = 0; r0 < grid.nrows; ++r0) {
    const double lat0 = deg2rad(grid.lat_center(r0));
    for (int r = 0; r < grid.nrows; ++r) {
      if (std::abs(grid.lat_center(r) - grid.lat_center(r0)) > psi_deg + 1e-9) continue;
      const double hw = cap_lon_halfwidth(lat0, deg2rad(grid.lat_center(r)), psi);
      if (hw < 0) continue;
      const int k = hw >= std::numbers::pi ? nc : static_cast<int>(std::floor(hw / dlon + 1e-9));
      for (int c0 = 0; c0 < nc; ++c0) {
        double sum = 0;
        if (2 * k + 1 >= nc && grid.wraps()) {
          sum = row_total[static_cast<std::size_t>(r)];
        } else if (grid.wraps()) {
          const int lo = c0 - k, hi = c0 + k;
          if (lo < 0)
            sum = range_sum(r, lo + nc, nc - 1) + range_sum(r, 0, hi);
          else if (hi >= nc)
            sum = range_sum(r, lo, nc - 1) + range_sum(r, 0, hi - nc);
          else
            sum = range_sum(r, lo, hi);
        } else {
          sum = range_sum(r, std::max(0, c0 - k), std::min(nc - 1, c0 + k));
        }
        out.value(r0, c0) += sum;
      }
    }
  }
  return out;
}

std::vector<TrackSample> track_samples(const DensityGrid& counts, double inclination_deg, int n_samples,
                                       std::uint64_t seed) {
  if (!(inclination_deg > 0) || inclination_deg > 180) throw ParameterError("track: inclination must be in (0, 180]");
  if (n_samples < 1) throw ParameterError("track: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double inc = deg2rad(inclination_deg);
  const double top = counts.yll_deg + counts.nrows * counts.cellsize_deg;
  std::vector<TrackSample> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double raan = angle(rng);
    const double u = angle(rng);
    const double lat = rad2deg(std::asin(std::sin(inc) * std::sin(u)));
    const double lon = wrap_lon_deg(rad2deg(raan + std::atan2(std::cos(inc) * std::sin(u), std::cos(u))));
    TrackSample s{{lat, lon}, 0.0};
    const int row = static_cast<int>(std::floor((top - lat) / counts.cellsize_deg));
    double rel = lon - counts.xll_deg;
    if (counts.wraps()) rel = std::fmod(std::fmod(rel, 360.0) + 360.0, 360.0);
    const int col = static_cast<int>(std::floor(rel / counts.cellsize_deg));
    if (row >= 0 && row < counts.nrows && col >= 0 && col < counts.ncols && counts.valid(row, col))
      s.count = counts.value(row, col);
    out.push_back(s);
  }
  return out;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw ParameterError("percentile of an empty set");
  if (!(pct > 0) || pct > 100) throw ParameterError("percentile must lie in (0, 100]");
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(values.size())));
  const auto k = std::min(values.size(), std::max<std::size_t>(rank, 1)) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

ParEstimate par_estimate(const DensityGrid& counts, double inclination_deg, int n_samples, std::uint64_t seed,
                         double peak_percentile) {
  const auto samples = track_samples(counts, inclination_deg, n_samples, seed);
  std::vector<double> values;
  values.reserve(samples.size());
  double sum = 0;
  for (const auto& s : samples) {
    values.push_back(s.count);
    sum += s.count;
  }
  ParEstimate e;
  e.samples = static_cast<int>(values.size());
  e.mean = sum / static_cast<double>(values.size());
  if (!(e.mean > 0)) throw UndefinedRatioError("PAR: sampled visible-subscriber counts are all zero");
  e.peak = percentile(std::move(values), peak_percentile);
  e.par = e.peak / e.mean;
  return e;
}

void ParParams::validate() const {
  if (!(gamma > 0)) throw ParameterError("population: gamma must be > 0");
  if (!(target_unserved_population >= 0)) throw ParameterError("population: target must be >= 0");
  if (rho_max && !(*rho_max >= 0)) throw ParameterError("population: rho_max must be >= 0");
  if (!(altitude_km > 0)) throw ParameterError("population: altitude must be > 0");
  if (!(phi0_deg > 0 && phi0_deg < 90)) throw ParameterError("population: phi0 must lie in (0, 90)");
  if (n_orbit_samples < 1) throw ParameterError("population: need at least one orbit sample");
  if (!(peak_percentile > 0 && peak_percentile <= 100)) throw ParameterError("population: bad peak percentile");
}

ParReport run_par(const DensityGrid& global, const DensityGrid* reference, const ParParams& params) {
  params.validate();
  ParReport report;
  if (reference) report.threshold = density_threshold(*reference, params.target_unserved_population);
  if (params.rho_max)
    report.rho_max = params.rho_max;
  else if (report.threshold)
    report.rho_max = params.gamma * *report.threshold;
  const DensityGrid capped = report.rho_max ? cap_density(global, *report.rho_max) : global;
  const DensityGrid counts = visible_subscribers(capped, params.altitude_km, params.phi0_deg);
  report.estimate = par_estimate(counts, params.inclination_deg, params.n_orbit_samples, params.rng_seed,
                                 params.peak_percentile);
  return report;
}

nlohmann::json to_json(const ParReport& r) {
  nlohmann::json j;
  j["threshold_per_km2"] = r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr);
  j["rho_max_per_km2"] = r.rho_max ? nlohmann::json(*r.rho_max) : nlohmann::json(nullptr);
  j["peak"] = r.estimate.peak;
  j["mean"] = r.estimate.mean;
  j["par"] = r.estimate.par;
  j["samples"] = r.estimate.samples;
  return j;
}

}  // namespace fusedleo
