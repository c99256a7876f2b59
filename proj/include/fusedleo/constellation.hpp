#pragma once

#include <Eigen/Core>
#include <span>
#include <string_view>
#include <vector>

#include "fusedleo/geo_cells.hpp"

namespace fusedleo {

// One Walker-delta shell of circular orbits.
struct ShellConfig {
  double altitude_km = 550.0;
  double inclination_deg = 53.0;
  int n_planes = 72;
  int sats_per_plane = 22;
  double raan_spread_deg = 360.0;
  double phase_offset_deg = 0.0;  // argument-of-latitude step between adjacent planes

  void validate() const;
  int size() const { return n_planes * sats_per_plane; }
};

struct ConstellationConfig {
  std::vector<ShellConfig> shells;
  int n_beams = 15;
  int n_channels = 76;
  int n_bc = 264;  // simultaneous beam-channels per SV

  void validate() const;
  int n_sats() const;
};

struct SvState {
  int sv_id = 0;
  int shell = 0;
  Eigen::Vector3d position_km = Eigen::Vector3d::Zero();     // Earth-fixed
  Eigen::Vector3d velocity_km_s = Eigen::Vector3d::Zero();   // Earth-fixed
  double epoch_s = 0.0;
};

enum class Exclusion { none, horizon, below_mask, geo_arc };
std::string_view to_string(Exclusion e);

struct LineOfSight {
  int sv_id = 0;
  double elevation_deg = 0.0;
  double azimuth_deg = 0.0;  // clockwise from north
  double range_km = 0.0;
  Exclusion excluded = Exclusion::none;

  bool usable() const { return excluded == Exclusion::none; }
};

struct VisibilityOptions {
  double geo_mask_halfwidth_deg = 5.0;
  double goal_elevation_deg = 45.0;
};

double orbital_period(double altitude_km, double earth_radius_km = kEarthRadiusKm);

/// Earth-central angle from a ground site to the edge of coverage of an SV at
/// `altitude_km` seen at elevation `elevation_deg`, radians.
double coverage_half_angle(double altitude_km, double elevation_deg, double earth_radius_km = kEarthRadiusKm);

/// Slant range to an SV at `altitude_km` seen at `elevation_deg`.
double slant_range(double altitude_km, double elevation_deg, double earth_radius_km = kEarthRadiusKm);

std::vector<SvState> propagate(const ConstellationConfig& config, double t_s,
                               double earth_radius_km = kEarthRadiusKm);

/// Smallest angle between the direction `los_unit` from `site_km` and any
/// point of the geostationary ring, radians.
double geo_arc_separation(const Eigen::Vector3d& site_km, const Eigen::Vector3d& los_unit);

LineOfSight line_of_sight(const SvState& sv, GeoPoint site, const GridParams& grid,
                          double geo_mask_halfwidth_deg);

/// Line of sight from `cell` to every SV in `states`, in input order.
std::vector<LineOfSight> visible_svs(std::span<const SvState> states, const Cell& cell,
                                     const GridParams& grid, double geo_mask_halfwidth_deg);

/// Unit goal direction (east, north, up) for signal s (1-based) of n.
Eigen::Vector3d goal_direction(int s, int n, double goal_elevation_deg);

/// For each signal s = 1..n, the usable SV ids ordered by descending
/// alignment of their line of sight with the goal direction (ties: lower id).
std::vector<std::vector<int>> select_diverse(std::span<const LineOfSight> visible, int n,
                                             double goal_elevation_deg = 45.0, int cell_id = -1);

/// Time for a burst from `sv` to first reach the cell, seconds. The cell is
/// approximated by its center and six vertices.
double flight_time(const SvState& sv, const Cell& cell, const GridParams& grid);

// Bucketed sub-satellite points, for visibility queries at scale.
class SvIndex {
 public:
  SvIndex(std::span<const SvState> states, double earth_radius_km = kEarthRadiusKm);

  /// Line of sight to every SV above the geometric horizon of `cell`
  /// (ascending sv id).
  std::vector<LineOfSight> in_view(const Cell& cell, const GridParams& grid,
                                   double geo_mask_halfwidth_deg) const;

  std::span<const SvState> states() const { return states_; }

 private:
  std::span<const SvState> states_;
  std::vector<GeoPoint> subpoints_;
  double radius_km_;
  double max_half_angle_ = 0.0;
  double bucket_deg_ = 2.0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace fusedleo
