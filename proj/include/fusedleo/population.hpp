#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fusedleo/spherical.hpp"

namespace fusedleo {

// Lat/lon raster of population density (people/km^2), stored as in the ASCII
// grid file: row 0 is the northernmost row, columns run west to east.
//
// File format (whitespace separated, '#' starts a comment line):
//   ncols <int>
//   nrows <int>
//   cellsize_deg <float>
//   nodata <float>
//   xllcorner_deg <float>   optional, default -180
//   yllcorner_deg <float>   optional, default -90
//   nrows lines of ncols values
struct DensityGrid {
  int ncols = 0;
  int nrows = 0;
  double cellsize_deg = 1.0;
  double nodata = -9999.0;
  double xll_deg = -180.0;
  double yll_deg = -90.0;
  std::vector<double> density;  // nodata cells hold `nodata`

  void validate() const;
  bool valid(int row, int col) const { return value(row, col) != nodata; }
  double value(int row, int col) const { return density[index(row, col)]; }
  double& value(int row, int col) { return density[index(row, col)]; }
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * ncols + col; }

  double lat_center(int row) const { return yll_deg + (nrows - row - 0.5) * cellsize_deg; }
  double lon_center(int col) const { return xll_deg + (col + 0.5) * cellsize_deg; }
  bool wraps() const;  // spans all 360 degrees of longitude

  /// Area of a cell in `row`, R^2·dlon·(sin lat2 - sin lat1).
  double cell_area_km2(int row, double radius_km = kEarthRadiusKm) const;
  /// People in a cell; zero for nodata.
  double population(int row, int col, double radius_km = kEarthRadiusKm) const;
  double total_population(double radius_km = kEarthRadiusKm) const;
};

DensityGrid read_density_grid(std::istream& in);
DensityGrid load_density_grid(const std::string& path);
void write_density_grid(std::ostream& out, const DensityGrid& grid);

struct GaussianBlob {
  double lat_deg = 0;
  double lon_deg = 0;
  double sigma_km = 500;
  double peak = 100;
};

struct SynthSpec {
  enum class Kind { uniform, hotspot, mixture };
  Kind kind = Kind::uniform;
  double cellsize_deg = 1.0;
  double density = 10.0;     // uniform level, or the hotspot density
  double background = 0.0;   // density outside the hotspot / under the mixture
  GeoPoint hotspot_center;   // hotspot: cells whose centers lie within
  double hotspot_radius_km = 500.0;  //   this distance get `density`
  std::vector<GaussianBlob> blobs;
};

/// Global synthetic raster for tests and demos.
DensityGrid synth_density(const SynthSpec& spec);

/// Density at which the population, accumulated from the sparsest cells up,
/// first exceeds `target`. Throws RangeError if target >= total population.
double density_threshold(const DensityGrid& grid, double target, double radius_km = kEarthRadiusKm);

/// Pointwise min(density, rho_max); nodata cells untouched.
DensityGrid cap_density(const DensityGrid& grid, double rho_max);

/// Earth-central radius of the region an SV at `altitude_km` serves above
/// elevation `phi0_deg`: arccos(R cos phi0 / (R+h)) - phi0, radians.
double visibility_cap_angle(double altitude_km, double phi0_deg, double radius_km = kEarthRadiusKm);

/// For each raster cell center taken as a sub-satellite point, the population
/// of all cells whose centers lie within the visibility cap.
DensityGrid visible_subscribers(const DensityGrid& grid, double altitude_km, double phi0_deg,
                                double radius_km = kEarthRadiusKm);

struct TrackSample {
  GeoPoint point;
  double count = 0;
};

/// Samples `counts` at sub-satellite points of circular orbits with uniform
/// RAAN and argument of latitude. Points off the raster read zero.
std::vector<TrackSample> track_samples(const DensityGrid& counts, double inclination_deg, int n_samples,
                                       std::uint64_t seed);

/// Nearest-rank percentile (0 < pct <= 100) of `values`.
double percentile(std::vector<double> values, double pct);

struct ParEstimate {
  double peak = 0;  // percentile of samples
  double mean = 0;
  double par = 0;
  int samples = 0;
};

/// Peak (the `peak_percentile` of track samples) over mean. Throws
/// UndefinedRatioError if the mean is zero.
ParEstimate par_estimate(const DensityGrid& counts, double inclination_deg, int n_samples, std::uint64_t seed,
                         double peak_percentile = 99.9);

struct ParParams {
  double target_unserved_population = 42e6;
  double gamma = 122.0 / 83.0;
  std::optional<double> rho_max;  // overrides gamma x threshold
  double altitude_km = 550.0;
  double inclination_deg = 53.0;
  double phi0_deg = 40.0;
  int n_orbit_samples = 200'000;
  std::uint64_t rng_seed = 1;
  double peak_percentile = 99.9;

  void validate() const;
};

struct ParReport {
  std::optional<double> threshold;  // from the reference-region raster, if given
  std::optional<double> rho_max;
  ParEstimate estimate;
};

/// Full pipeline: threshold on `reference` (if any) to get rho_max, cap the
/// global raster, count visible subscribers, sample along tracks.
ParReport run_par(const DensityGrid& global, const DensityGrid* reference, const ParParams& params);

nlohmann::json to_json(const ParReport& r);

}  // namespace fusedleo
