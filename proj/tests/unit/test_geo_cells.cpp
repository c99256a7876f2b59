#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "fusedleo/errors.hpp"
#include "fusedleo/geo_cells.hpp"

using namespace fusedleo;

namespace {

GridParams band(double d_km, double lat_max = 60.0) {
  GridParams p;
  p.cell_diameter_km = d_km;
  p.lat_max_deg = lat_max;
  return p;
}

int brute_nearest(const CellGrid& grid, GeoPoint p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : grid.cells()) {
    const double d = central_angle(p, c.center);
    if (d < best_d) {
      best_d = d;
      best = c.id;
    }
  }
  return best;
}

GeoPoint random_point(std::mt19937_64& rng, double lat_max) {
  // uniform on the band: sin(lat) uniform
  std::uniform_real_distribution<double> z(-std::sin(deg2rad(lat_max)), std::sin(deg2rad(lat_max)));
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  return {rad2deg(std::asin(z(rng))), lon(rng)};
}

}  // namespace

TEST_SUITE("geo_cells") {
  TEST_CASE("hex area at 29 km") { CHECK(hex_area(29.0) == doctest::Approx(546.3).epsilon(1e-4)); }

  TEST_CASE("service area") {
    CHECK(service_area(60, 6371) == doctest::Approx(4.417e8).epsilon(1e-3));
    CHECK(service_area(90, 6371) == doctest::Approx(4 * std::numbers::pi * 6371.0 * 6371.0));
    CHECK(service_area(60, 1) == doctest::Approx(10.883).epsilon(1e-4));
  }

  TEST_CASE("sweep time") {
    GridParams p = band(29);
    CHECK(sweep_time(p) * 1e6 == doctest::Approx(29000 / kSpeedOfLight * std::cos(deg2rad(40)) * 1e6));
    CHECK(sweep_time(p) * 1e6 == doctest::Approx(74.1).epsilon(1e-3));
    p.min_elevation_deg = 90;
    CHECK(sweep_time(p) == 0.0);
    p = band(29);
    p.cell_diameter_km = 0;
    CHECK(sweep_time(p) == 0.0);
  }

  TEST_CASE("sweep time decreases in elevation and is linear in diameter") {
    GridParams p = band(29);
    double prev = std::numeric_limits<double>::infinity();
    for (double phi = 5; phi < 90; phi += 5) {
      p.min_elevation_deg = phi;
      CHECK(sweep_time(p) < prev);
      prev = sweep_time(p);
    }
    p.min_elevation_deg = 40;
    const double base = sweep_time(p);
    p.cell_diameter_km = 87;
    CHECK(sweep_time(p) == doctest::Approx(3 * base));
  }

  TEST_CASE("full-scale grid size") {
    const CellGrid grid = CellGrid::build(band(29));
    CHECK(std::abs(static_cast<double>(grid.size()) / 8.09e5 - 1.0) <= 0.10);
    CHECK(grid.max_neighbor_count() <= 6);
  }

  TEST_CASE("cell count scales with 1/D^2") {
    const double a = static_cast<double>(CellGrid::build(band(400)).size());
    const double b = static_cast<double>(CellGrid::build(band(200)).size());
    CHECK(b / a >= 3.6);
    CHECK(b / a <= 4.4);
  }

  TEST_CASE("adjacency is symmetric with 3 to 6 neighbors") {
    for (double d : {300.0, 583.0, 1500.0}) {
      const CellGrid grid = CellGrid::build(band(d));
      for (const auto& c : grid.cells()) {
        CHECK(c.neighbor_ids.size() >= 3);
        CHECK(c.neighbor_ids.size() <= 6);
        CHECK(std::abs(c.center.lat_deg) <= 60.0);
        const std::set<int> unique(c.neighbor_ids.begin(), c.neighbor_ids.end());
        CHECK(unique.size() == c.neighbor_ids.size());
        CHECK(!unique.count(c.id));
        for (int n : c.neighbor_ids) {
          const auto& other = grid.cell(n).neighbor_ids;
          CHECK(std::find(other.begin(), other.end(), c.id) != other.end());
        }
      }
    }
  }

  TEST_CASE("ids are dense") {
    const CellGrid grid = CellGrid::build(band(583));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid.cells()[i].id == static_cast<int>(i));
  }

  TEST_CASE("degenerate narrow band") {
    GridParams p = band(200, 0.5);
    const CellGrid grid = CellGrid::build(p);
    REQUIRE(grid.size() > 0);
    for (const auto& c : grid.cells()) {
      CHECK(c.neighbor_ids.size() >= 3);
      for (int n : c.neighbor_ids) {
        const auto& other = grid.cell(n).neighbor_ids;
        CHECK(std::find(other.begin(), other.end(), c.id) != other.end());
      }
    }
  }

  TEST_CASE("nearest cell of a center is that cell") {
    const CellGrid grid = CellGrid::build(band(583));
    for (const auto& c : grid.cells()) CHECK(grid.nearest_cell(c.center) == c.id);
  }

  TEST_CASE("nearest cell matches exhaustive scan") {
    const CellGrid grid = CellGrid::build(band(583));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
      const GeoPoint p = random_point(rng, 60);
      CHECK(grid.nearest_cell(p) == brute_nearest(grid, p));
    }
  }

  TEST_CASE("coverage: nearest center lies within D") {
    const GridParams p = band(300);
    const CellGrid grid = CellGrid::build(p);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const GeoPoint pt = random_point(rng, 60);
      const int id = grid.nearest_cell(pt);
      CHECK(central_angle(pt, grid.cell(id).center) * p.earth_radius_km <= p.cell_diameter_km);
    }
  }

  TEST_CASE("equidistant point goes to the lower id") {
    // Two explicit cells on the equator either side of the origin.
    GridParams p = band(100, 10);
    std::vector<Cell> cells(2);
    cells[0] = {0, {0.0, -1.0}, {1}};
    cells[1] = {1, {0.0, 1.0}, {0}};
    const CellGrid grid = CellGrid::from_cells(p, cells);
    CHECK(grid.nearest_cell({0.0, 0.0}) == 0);
    CHECK(grid.nearest_cell({0.0, 0.5}) == 1);
  }

  TEST_CASE("nearest cell outside the band") {
    const CellGrid grid = CellGrid::build(band(583));
    CHECK_THROWS_AS(grid.nearest_cell({75.0, 0.0}), OutOfBandError);
  }

  TEST_CASE("cells within radius matches exhaustive scan") {
    const GridParams p = band(583);
    const CellGrid grid = CellGrid::build(p);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const GeoPoint pt = random_point(rng, 60);
      const double r = 1500.0;
      std::vector<int> expect;
      for (const auto& c : grid.cells())
        if (central_angle(pt, c.center) * p.earth_radius_km <= r) expect.push_back(c.id);
      CHECK(grid.cells_within(pt, r) == expect);
    }
  }

  TEST_CASE("csv round trip") {
    const CellGrid grid = CellGrid::build(band(1500));
    std::stringstream buf;
    grid.write_csv(buf);
    const CellGrid back = CellGrid::read_csv(buf, grid.params());
    REQUIRE(back.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(back.cells()[i].center.lat_deg == grid.cells()[i].center.lat_deg);
      CHECK(back.cells()[i].center.lon_deg == grid.cells()[i].center.lon_deg);
      CHECK(back.cells()[i].neighbor_ids == grid.cells()[i].neighbor_ids);
    }
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(CellGrid::build(band(0)), ParameterError);
    CHECK_THROWS_AS(CellGrid::build(band(29, 0)), ParameterError);
    GridParams p = band(29);
    p.min_elevation_deg = 90;
    CHECK_THROWS_AS(CellGrid::build(p), ParameterError);
  }
}
