#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "fusedleo/spherical.hpp"

namespace fusedleo {

struct GridParams {
  double cell_diameter_km = 29.0;  // long (vertex-to-vertex) diagonal
  double lat_max_deg = 60.0;
  double earth_radius_km = kEarthRadiusKm;
  double min_elevation_deg = 40.0;

  void validate() const;
};

struct Cell {
  int id = 0;
  GeoPoint center;
  std::vector<int> neighbor_ids;
};

/// Area of a regular hexagon whose long diagonal is `diameter`.
double hex_area(double diameter);

/// Area of the spherical band |lat| <= lat_max on a sphere of radius `radius`.
double service_area(double lat_max_deg, double radius);

/// Wavefront traverse time across one cell, (D/c)·cos(phi0), in seconds.
double sweep_time(const GridParams& params);

/// Nominal cell count: service area over hexagon area.
double nominal_cell_count(const GridParams& params);

// Hexagonal service cells packed in latitude rows over |lat| <= lat_max.
// Ids run row by row from south to north, west to east within a row.
// Immutable after construction.
class CellGrid {
 public:
  static CellGrid build(const GridParams& params);

  // Grid from explicit cells (e.g. a CSV import). Adjacency is taken as given.
  static CellGrid from_cells(const GridParams& params, std::vector<Cell> cells);

  static CellGrid read_csv(std::istream& in, const GridParams& params);
  void write_csv(std::ostream& out) const;

  const GridParams& params() const noexcept { return params_; }
  std::span<const Cell> cells() const noexcept { return cells_; }
  const Cell& cell(int id) const { return cells_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return cells_.size(); }

  double mean_neighbor_count() const;
  int max_neighbor_count() const;

  /// Cell whose center is closest (great circle) to `point`; ties go to the
  /// lower id. Throws OutOfBandError when |lat| > lat_max.
  int nearest_cell(GeoPoint point) const;

  /// Ids of all cells whose centers lie within `radius_km` of `point`,
  /// ascending.
  std::vector<int> cells_within(GeoPoint point, double radius_km) const;

 private:
  CellGrid(GridParams params, std::vector<Cell> cells);
  void build_index();

  GridParams params_;
  std::vector<Cell> cells_;

  // Lat/lon bucket index, CSR layout.
  double bucket_deg_ = 1.0;
  int bucket_rows_ = 0;
  int bucket_cols_ = 0;
  std::vector<int> bucket_offsets_;
  std::vector<int> bucket_items_;
};

}  // namespace fusedleo
