#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fusedleo/errors.hpp"
#include "fusedleo/population.hpp"

using namespace fusedleo;

namespace {

DensityGrid uniform(double density, double cellsize = 1.0) {
  SynthSpec s;
  s.kind = SynthSpec::Kind::uniform;
  s.density = density;
  s.cellsize_deg = cellsize;
  return synth_density(s);
}

DensityGrid random_grid(std::uint64_t seed, double cellsize = 5.0) {
  DensityGrid g = uniform(0, cellsize);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(0.02);
  for (double& d : g.density) d = e(rng);
  return g;
}

// Sphere-zone area of a lat band over dlon, computed as the difference of
// two polar caps.
double zone_area(double lat1, double lat2, double dlon_deg, double r = kEarthRadiusKm) {
  auto cap = [&](double lat) { return 2 * std::numbers::pi * r * r * (1 - std::cos(deg2rad(90 - lat))); };
  return (cap(lat1) - cap(lat2)) * dlon_deg / 360.0;
}

}  // namespace

TEST_SUITE("population") {
  TEST_CASE("uniform synthetic raster") {
    const DensityGrid g = uniform(10);
    CHECK(g.ncols == 360);
    CHECK(g.nrows == 180);
    CHECK(g.wraps());
    for (int r = 0; r < g.nrows; ++r)
      for (int c = 0; c < g.ncols; ++c) CHECK(g.value(r, c) == 10);
    CHECK(g.total_population() == doctest::Approx(10 * 4 * std::numbers::pi * kEarthRadiusKm * kEarthRadiusKm));
  }

  TEST_CASE("cell area matches the spherical zone") {
    const DensityGrid g = uniform(1);
    for (int r = 0; r < g.nrows; ++r) {
      const double lat = g.lat_center(r);
      CHECK(g.cell_area_km2(r) == doctest::Approx(zone_area(lat - 0.5, lat + 0.5, 1)).epsilon(1e-3));
    }
  }

  TEST_CASE("write and read back") {
    DensityGrid g = random_grid(3);
    g.value(2, 5) = g.nodata;
    std::stringstream ss;
    write_density_grid(ss, g);
    const DensityGrid h = read_density_grid(ss);
    CHECK(h.ncols == g.ncols);
    CHECK(h.nrows == g.nrows);
    CHECK(h.cellsize_deg == g.cellsize_deg);
    CHECK(h.nodata == g.nodata);
    CHECK(h.density == g.density);
    CHECK(!h.valid(2, 5));
    CHECK(h.population(2, 5) == 0);
  }

  TEST_CASE("malformed rasters name the line") {
    auto parse_line = [](const std::string& text) {
      std::istringstream in(text);
      try {
        read_density_grid(in);
      } catch (const ParseError& e) {
        return e.line();
      }
      return -1;
    };
    CHECK(parse_line("ncols 2\nnrows 2\ncellsize_deg 90\nnodata -1\n1 2\n3\n") == 6);
    CHECK(parse_line("ncols 2\nnrows 2\nbogus 1\n") == 3);
    CHECK(parse_line("ncols 2\nnrows 2\ncellsize_deg 90\nnodata -1\n1 2\n3 x\n") == 6);
    CHECK(parse_line("ncols 2\nnrows 2\ncellsize_deg 90\nnodata -1\n1 2\n") >= 0);
    CHECK(parse_line("ncols 2\nnrows 2\ncellsize_deg 90\nnodata -1\n1 2\n3 4\n5 6\n") == 7);
    std::istringstream bad_size("ncols 2\nnrows 2\ncellsize_deg 7\nnodata -1\n1 2\n3 4\n");
    CHECK_THROWS_AS(read_density_grid(bad_size), ParseError);
    CHECK_THROWS_AS(load_density_grid("/nonexistent/raster.asc"), IoError);
  }

  TEST_CASE("threshold of a uniform raster is its density") {
    const DensityGrid g = uniform(10, 5);
    const double total = g.total_population();
    for (double f : {1e-6, 0.1, 0.5, 0.999}) CHECK(density_threshold(g, f * total) == 10);
    CHECK_THROWS_AS(density_threshold(g, total), RangeError);
    CHECK_THROWS_AS(density_threshold(g, 2 * total), RangeError);
  }

  TEST_CASE("two-bin threshold") {
    DensityGrid g = uniform(5, 10);
    double low = 0;
    for (int r = 0; r < g.nrows; ++r)
      for (int c = 0; c < g.ncols; ++c) {
        if (c % 2) g.value(r, c) = 50;
        else low += g.population(r, c);
      }
    CHECK(density_threshold(g, 0.5 * low) == 5);
    CHECK(density_threshold(g, 0.999 * low) == 5);
    CHECK(density_threshold(g, 1.001 * low) == 50);
  }

  TEST_CASE("threshold is nondecreasing in the target") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DensityGrid g = random_grid(seed);
      const double total = g.total_population();
      double prev = -1;
      for (int i = 0; i < 100; ++i) {
        const double t = density_threshold(g, total * i / 100.0);
        CHECK(t >= prev);
        prev = t;
      }
    }
  }

  TEST_CASE("capping") {
    const DensityGrid low = uniform(10, 5);
    CHECK(cap_density(low, 92.7).density == low.density);
    for (double d : cap_density(uniform(200, 5), 92.7).density) CHECK(d == 92.7);
    DensityGrid g = random_grid(11);
    g.value(0, 0) = g.nodata;
    const DensityGrid c = cap_density(g, 40);
    CHECK(c.value(0, 0) == g.nodata);
    for (std::size_t i = 1; i < g.density.size(); ++i) CHECK(c.density[i] == std::min(g.density[i], 40.0));
    CHECK(c.total_population() <= g.total_population());
    CHECK(cap_density(c, 40).density == c.density);
    CHECK_THROWS_AS(cap_density(g, -1), ParameterError);
  }

  TEST_CASE("visibility cap angle") {
    // Independent construction: nadir angle eta from the law of sines, then
    // psi = 90 - phi0 - eta.
    auto oracle = [](double h, double phi0) {
      const double eta = std::asin(kEarthRadiusKm * std::cos(deg2rad(phi0)) / (kEarthRadiusKm + h));
      return std::numbers::pi / 2 - deg2rad(phi0) - eta;
    };
    for (double h : {300.0, 550.0, 1200.0})
      for (double phi0 : {10.0, 25.0, 40.0, 60.0}) CHECK(visibility_cap_angle(h, phi0) == doctest::Approx(oracle(h, phi0)));
    const double psi = visibility_cap_angle(550, 40);
    CHECK(rad2deg(psi) == doctest::Approx(5.157).epsilon(1e-3));
    CHECK(psi * kEarthRadiusKm == doctest::Approx(573.4).epsilon(1e-3));
    CHECK_THROWS_AS(visibility_cap_angle(0, 40), ParameterError);
  }

  TEST_CASE("uniform density sees rho times the cap area") {
    const double rho = 10;
    const DensityGrid counts = visible_subscribers(uniform(rho, 0.5), 550, 40);
    const double psi = visibility_cap_angle(550, 40);
    const double cap = 2 * std::numbers::pi * kEarthRadiusKm * kEarthRadiusKm * (1 - std::cos(psi));
    for (int r = 0; r < counts.nrows; ++r) {
      if (std::abs(counts.lat_center(r)) > 80) continue;  // rows near the pole discretize coarsely
      CHECK(counts.value(r, r % counts.ncols) == doctest::Approx(rho * cap).epsilon(0.02));
    }
  }

  TEST_CASE("single populated cell is seen exactly from within the cap") {
    DensityGrid g = uniform(0, 1);
    const int r0 = 40, c0 = 357;  // 49.5N, 177.5E, near the antimeridian
    g.value(r0, c0) = 100;
    const DensityGrid counts = visible_subscribers(g, 550, 40);
    const double psi = visibility_cap_angle(550, 40);
    const GeoPoint src{g.lat_center(r0), g.lon_center(c0)};
    int inside = 0;
    for (int r = 0; r < g.nrows; ++r)
      for (int c = 0; c < g.ncols; ++c) {
        const bool within = central_angle({g.lat_center(r), g.lon_center(c)}, src) <= psi;
        CHECK((counts.value(r, c) > 0) == within);
        if (within) {
          CHECK(counts.value(r, c) == doctest::Approx(g.population(r0, c0)));
          ++inside;
        }
      }
    CHECK(inside > 50);
  }

  TEST_CASE("higher altitude never sees fewer subscribers") {
    const DensityGrid g = random_grid(5, 2);
    const DensityGrid a = visible_subscribers(g, 550, 40);
    const DensityGrid b = visible_subscribers(g, 800, 40);
    for (std::size_t i = 0; i < a.density.size(); ++i) CHECK(b.density[i] >= a.density[i] - 1e-6 * a.density[i]);
  }

  TEST_CASE("percentile") {
    CHECK(percentile({5, 1, 4, 2, 3}, 100) == 5);
    CHECK(percentile({5, 1, 4, 2, 3}, 20) == 1);
    CHECK(percentile({5, 1, 4, 2, 3}, 50) == 3);
    CHECK_THROWS_AS(percentile({}, 50), ParameterError);
    CHECK_THROWS_AS(percentile({1}, 0), ParameterError);
  }

  TEST_CASE("track samples stay within the inclination") {
    const auto s = track_samples(uniform(1), 53, 5000, 2);
    CHECK(s.size() == 5000);
    double max_lat = 0;
    for (const auto& t : s) max_lat = std::max(max_lat, std::abs(t.point.lat_deg));
    CHECK(max_lat <= 53 + 1e-9);
    CHECK(max_lat > 52);
    CHECK_THROWS_AS(track_samples(uniform(1), 0, 10, 1), ParameterError);
  }

  TEST_CASE("uniform density gives PAR 1") {
    const DensityGrid counts = visible_subscribers(uniform(10, 0.5), 550, 40);
    const auto e = par_estimate(counts, 53, 20000, 1);
    CHECK(e.par == doctest::Approx(1).epsilon(0.02));
    CHECK(e.par >= 1);
  }

  TEST_CASE("hotspot PAR from a hand count of track samples") {
    DensityGrid g = uniform(0, 1);
    g.value(90, 10) = 1000;  // 0.5N, 169.5W
    const DensityGrid counts = visible_subscribers(g, 550, 40);
    const int n = 100000;
    const auto samples = track_samples(counts, 53, n, 4);
    const GeoPoint spot{g.lat_center(90), g.lon_center(10)};
    const double psi = visibility_cap_angle(550, 40);
    int in_cap = 0;
    for (const auto& s : samples) {
      // snap to the raster cell the sample falls in
      const int r = static_cast<int>(std::floor(90 - s.point.lat_deg));
      const int c = static_cast<int>(std::floor(s.point.lon_deg + 180)) % 360;
      if (central_angle({g.lat_center(r), g.lon_center(c)}, spot) <= psi) ++in_cap;
    }
    REQUIRE(in_cap > n / 1000);
    const auto e = par_estimate(counts, 53, n, 4);
    CHECK(e.par == doctest::Approx(static_cast<double>(n) / in_cap).epsilon(1e-9));
  }

  TEST_CASE("PAR properties") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const DensityGrid g = random_grid(seed, 2);
      DensityGrid scaled = g;
      for (double& d : scaled.density) d *= 7.5;
      const auto a = par_estimate(visible_subscribers(g, 550, 40), 53, 5000, seed);
      const auto b = par_estimate(visible_subscribers(scaled, 550, 40), 53, 5000, seed);
      CHECK(a.par >= 1);
      CHECK(b.par == doctest::Approx(a.par).epsilon(1e-9));
    }
  }

  TEST_CASE("all-zero raster has no PAR") {
    const DensityGrid counts = visible_subscribers(uniform(0, 5), 550, 40);
    CHECK_THROWS_AS(par_estimate(counts, 53, 1000, 1), UndefinedRatioError);
  }

  TEST_CASE("pipeline derives rho_max from the reference threshold") {
    DensityGrid ref = uniform(5, 10);
    for (int c = 0; c < ref.ncols; c += 2)
      for (int r = 0; r < ref.nrows; ++r) ref.value(r, c) = 60;
    ParParams p;
    p.target_unserved_population = 0.05 * ref.total_population();
    p.n_orbit_samples = 2000;
    const DensityGrid global = random_grid(9, 2);
    const ParReport rep = run_par(global, &ref, p);
    REQUIRE(rep.threshold);
    CHECK(*rep.threshold == 5);
    CHECK(*rep.rho_max == doctest::Approx(5 * 122.0 / 83.0));
    p.rho_max = 1e9;
    const ParReport uncapped = run_par(global, nullptr, p);
    CHECK(!uncapped.threshold);
    ParParams plain = p;
    plain.rho_max.reset();
    CHECK(uncapped.estimate.par == doctest::Approx(run_par(global, nullptr, plain).estimate.par));
    const auto j = to_json(rep);
    CHECK(j.at("par").get<double>() == rep.estimate.par);
    p.gamma = 0;
    CHECK_THROWS_AS(run_par(global, nullptr, p), ParameterError);
  }
}
