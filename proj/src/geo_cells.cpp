#include "fusedleo/geo_cells.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "fusedleo/errors.hpp"

namespace fusedleo {

void GridParams::validate() const {
  if (!(cell_diameter_km > 0)) throw ParameterError("grid: cell_diameter_km must be > 0");
  if (!(lat_max_deg > 0 && lat_max_deg <= 90)) throw ParameterError("grid: lat_max_deg must be in (0, 90]");
  if (!(earth_radius_km > 0)) throw ParameterError("grid: earth_radius_km must be > 0");
  if (!(min_elevation_deg > 0 && min_elevation_deg < 90))
    throw ParameterError("grid: min_elevation_deg must be in (0, 90)");
}

double hex_area(double diameter) { return 3.0 * std::sqrt(3.0) / 8.0 * diameter * diameter; }

double service_area(double lat_max_deg, double radius) {
  return 4.0 * std::numbers::pi * radius * radius * std::sin(deg2rad(lat_max_deg));
}

double sweep_time(const GridParams& params) {
  const double cos_phi0 = std::cos(deg2rad(params.min_elevation_deg));
  // cos(90 deg) is 6e-17 in floating point, not zero.
  if (cos_phi0 < 1e-12) return 0.0;
  return params.cell_diameter_km * 1e3 / kSpeedOfLight * cos_phi0;
}

double nominal_cell_count(const GridParams& params) {
  return service_area(params.lat_max_deg, params.earth_radius_km) / hex_area(params.cell_diameter_km);
}

namespace {

struct RowLayout {
  double lat_deg;
  int first_id;
  int count;
  double offset;  // fraction of a column
};

double column_lon(const RowLayout& row, int j) {
  return wrap_lon_deg(360.0 * (j + row.offset) / row.count - 180.0);
}

// The two cells of `row` whose longitudes bracket `lon_deg`.
std::pair<int, int> bracket(const RowLayout& row, double lon_deg) {
  const double x = (lon_deg + 180.0) / 360.0 * row.count - row.offset;
  int k = static_cast<int>(std::floor(x));
  k = ((k % row.count) + row.count) % row.count;
  return {k, (k + 1) % row.count};
}

bool in_bracket(std::pair<int, int> b, int j) { return b.first == j || b.second == j; }

}  // namespace

CellGrid::CellGrid(GridParams params, std::vector<Cell> cells)
    : params_(params), cells_(std::move(cells)) {
  build_index();
}

CellGrid CellGrid::build(const GridParams& params) {
  params.validate();
  const double r = params.cell_diameter_km / 2.0;
  const double radius = params.earth_radius_km;
  const double lat_max = deg2rad(params.lat_max_deg);
  const double spacing = 1.5 * r / radius;
  const int n_rows = std::max(2, static_cast<int>(std::lround(2.0 * lat_max / spacing)));
  const double step = 2.0 * lat_max / n_rows;

  std::vector<RowLayout> rows;
  rows.reserve(static_cast<std::size_t>(n_rows));
  int next_id = 0;
  for (int i = 0; i < n_rows; ++i) {
    const double lat = -lat_max + step * (i + 0.5);
    const double circumference = 2.0 * std::numbers::pi * radius * std::cos(lat);
    const int count = std::max(3, static_cast<int>(std::lround(circumference / (std::sqrt(3.0) * r))));
    rows.push_back({rad2deg(lat), next_id, count, (i % 2) ? 0.5 : 0.0});
    next_id += count;
  }

  std::vector<Cell> cells(static_cast<std::size_t>(next_id));
  for (const auto& row : rows) {
    for (int j = 0; j < row.count; ++j) {
      Cell& c = cells[static_cast<std::size_t>(row.first_id + j)];
      c.id = row.first_id + j;
      c.center = {row.lat_deg, column_lon(row, j)};
      c.neighbor_ids.push_back(row.first_id + (j + 1) % row.count);
      c.neighbor_ids.push_back(row.first_id + (j + row.count - 1) % row.count);
    }
  }

  // Cross-row links: a and b are adjacent when each lies in the other's
  // longitude bracket. Mutual selection keeps the relation symmetric and caps
  // it at two links per adjacent row.
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const RowLayout& lo = rows[i];
    const RowLayout& hi = rows[i + 1];
    for (int ja = 0; ja < lo.count; ++ja) {
      const auto up = bracket(hi, column_lon(lo, ja));
      for (int jb : {up.first, up.second}) {
        if (in_bracket(bracket(lo, column_lon(hi, jb)), ja)) {
          cells[static_cast<std::size_t>(lo.first_id + ja)].neighbor_ids.push_back(hi.first_id + jb);
          cells[static_cast<std::size_t>(hi.first_id + jb)].neighbor_ids.push_back(lo.first_id + ja);
        }
      }
    }
  }
  for (auto& c : cells) {
    std::sort(c.neighbor_ids.begin(), c.neighbor_ids.end());
    c.neighbor_ids.erase(std::unique(c.neighbor_ids.begin(), c.neighbor_ids.end()), c.neighbor_ids.end());
    std::erase(c.neighbor_ids, c.id);
  }
  return CellGrid(params, std::move(cells));
}

CellGrid CellGrid::from_cells(const GridParams& params, std::vector<Cell> cells) {
  params.validate();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].id != static_cast<int>(i)) throw ParameterError("grid: cell ids must be dense 0..N-1 in order");
    for (int nb : cells[i].neighbor_ids)
      if (nb < 0 || nb >= static_cast<int>(cells.size()) || nb == cells[i].id)
        throw ParameterError("grid: cell " + std::to_string(i) + " has invalid neighbor " + std::to_string(nb));
  }
  return CellGrid(params, std::move(cells));
}

void CellGrid::build_index() {
  const double ang_deg = rad2deg(params_.cell_diameter_km / params_.earth_radius_km);
  bucket_deg_ = std::clamp(ang_deg, 0.05, 10.0);
  bucket_rows_ = static_cast<int>(std::ceil(180.0 / bucket_deg_));
  bucket_cols_ = static_cast<int>(std::ceil(360.0 / bucket_deg_));
  const std::size_t n_buckets = static_cast<std::size_t>(bucket_rows_) * static_cast<std::size_t>(bucket_cols_);

  auto bucket_of = [&](GeoPoint p) {
    const int row = std::clamp(static_cast<int>(std::floor((p.lat_deg + 90.0) / bucket_deg_)), 0, bucket_rows_ - 1);
    int col = static_cast<int>(std::floor((p.lon_deg + 180.0) / bucket_deg_));
    col = ((col % bucket_cols_) + bucket_cols_) % bucket_cols_;
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(bucket_cols_) + static_cast<std::size_t>(col);
  };

  bucket_offsets_.assign(n_buckets + 1, 0);
  for (const auto& c : cells_) ++bucket_offsets_[bucket_of(c.center) + 1];
  for (std::size_t b = 0; b < n_buckets; ++b) bucket_offsets_[b + 1] += bucket_offsets_[b];
  bucket_items_.assign(cells_.size(), 0);
  std::vector<int> fill(bucket_offsets_.begin(), bucket_offsets_.end() - 1);
  for (const auto& c : cells_) bucket_items_[static_cast<std::size_t>(fill[bucket_of(c.center)]++)] = c.id;
}

double CellGrid::mean_neighbor_count() const {
  if (cells_.empty()) return 0.0;
  double total = 0;
  for (const auto& c : cells_) total += static_cast<double>(c.neighbor_ids.size());
  return total / static_cast<double>(cells_.size());
}

int CellGrid::max_neighbor_count() const {
  std::size_t m = 0;
  for (const auto& c : cells_) m = std::max(m, c.neighbor_ids.size());
  return static_cast<int>(m);
}

std::vector<int> CellGrid::cells_within(GeoPoint point, double radius_km) const {
  std::vector<int> out;
  const double ang = radius_km / params_.earth_radius_km;
  const double lat = deg2rad(point.lat_deg);
  const double lat_lo = point.lat_deg - rad2deg(ang);
  const double lat_hi = point.lat_deg + rad2deg(ang);
  const int row_lo = std::clamp(static_cast<int>(std::floor((lat_lo + 90.0) / bucket_deg_)), 0, bucket_rows_ - 1);
  const int row_hi = std::clamp(static_cast<int>(std::floor((lat_hi + 90.0) / bucket_deg_)), 0, bucket_rows_ - 1);

  bool all_cols = lat_hi >= 90.0 || lat_lo <= -90.0;
  double dlon_deg = 180.0;
  if (!all_cols) {
    const double s = std::sin(ang) / std::cos(lat);
    if (s >= 1.0) all_cols = true;
    else dlon_deg = rad2deg(std::asin(s));
  }
  int col_lo = 0, col_span = bucket_cols_;
  if (!all_cols) {
    col_lo = static_cast<int>(std::floor((point.lon_deg - dlon_deg + 180.0) / bucket_deg_)) - 1;
    const int col_hi = static_cast<int>(std::floor((point.lon_deg + dlon_deg + 180.0) / bucket_deg_)) + 1;
    col_span = std::min(bucket_cols_, col_hi - col_lo + 1);
  }

  for (int row = row_lo; row <= row_hi; ++row) {
    for (int k = 0; k < col_span; ++k) {
      const int col = (((col_lo + k) % bucket_cols_) + bucket_cols_) % bucket_cols_;
      const std::size_t b = static_cast<std::size_t>(row) * static_cast<std::size_t>(bucket_cols_) + static_cast<std::size_t>(col);
      for (int idx = bucket_offsets_[b]; idx < bucket_offsets_[b + 1]; ++idx) {
        const int id = bucket_items_[static_cast<std::size_t>(idx)];
        if (central_angle(point, cells_[static_cast<std::size_t>(id)].center) <= ang) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int CellGrid::nearest_cell(GeoPoint point) const {
  if (std::abs(point.lat_deg) > params_.lat_max_deg + 1e-9)
    throw OutOfBandError("point at latitude " + std::to_string(point.lat_deg) + " is outside the service band");
  if (cells_.empty()) throw OutOfBandError("grid has no cells");
  constexpr double kTieTolerance = 1e-12;
  double radius = params_.cell_diameter_km;
  const double max_radius = std::numbers::pi * params_.earth_radius_km;
  for (;;) {
    const auto ids = cells_within(point, radius);
    if (!ids.empty()) {
      int best = ids.front();
      double best_d = central_angle(point, cells_[static_cast<std::size_t>(best)].center);
      for (int id : ids) {
        const double d = central_angle(point, cells_[static_cast<std::size_t>(id)].center);
        if (d < best_d - kTieTolerance) {
          best = id;
          best_d = d;
        }
      }
      return best;
    }
    if (radius >= max_radius) break;
    radius = std::min(radius * 2.0, max_radius);
  }
  throw OutOfBandError("no cell found near point");
}

void CellGrid::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "cell_id,lat_deg,lon_deg,neighbor_ids\n";
  for (const auto& c : cells_) {
    out << c.id << ',' << c.center.lat_deg << ',' << c.center.lon_deg << ',';
    for (std::size_t i = 0; i < c.neighbor_ids.size(); ++i) out << (i ? ";" : "") << c.neighbor_ids[i];
    out << '\n';
  }
  out.precision(old_precision);
}

CellGrid CellGrid::read_csv(std::istream& in, const GridParams& params) {
  std::vector<Cell> cells;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("cell_id")) continue;
    std::stringstream ss(line);
    std::string id_s, lat_s, lon_s, nb_s;
    if (!std::getline(ss, id_s, ',') || !std::getline(ss, lat_s, ',') || !std::getline(ss, lon_s, ','))
      throw ParseError("expected cell_id,lat_deg,lon_deg,neighbor_ids", line_no);
    std::getline(ss, nb_s);
    Cell c;
    try {
      c.id = std::stoi(id_s);
      c.center = {std::stod(lat_s), std::stod(lon_s)};
      std::stringstream ns(nb_s);
      std::string tok;
      while (std::getline(ns, tok, ';'))
        if (!tok.empty()) c.neighbor_ids.push_back(std::stoi(tok));
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", line_no);
    }
    cells.push_back(std::move(c));
  }
  return from_cells(params, std::move(cells));
}

}  // namespace fusedleo
