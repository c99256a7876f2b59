#include "fusedleo/constellation.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "fusedleo/errors.hpp"

namespace fusedleo {

void ShellConfig::validate() const {
  if (!(altitude_km > 0)) throw ParameterError("shell: altitude_km must be > 0");
  if (!(inclination_deg >= 0 && inclination_deg <= 180)) throw ParameterError("shell: inclination_deg must be in [0, 180]");
  if (n_planes < 1 || sats_per_plane < 1) throw ParameterError("shell: n_planes and sats_per_plane must be >= 1");
}

void ConstellationConfig::validate() const {
  for (const auto& s : shells) s.validate();
  if (n_beams < 1 || n_channels < 1 || n_bc < 1) throw ParameterError("constellation: beam/channel counts must be >= 1");
  if (n_bc > n_beams * n_channels) throw ParameterError("constellation: n_bc exceeds n_beams * n_channels");
}

int ConstellationConfig::n_sats() const {
  int total = 0;
  for (const auto& s : shells) total += s.size();
  return total;
}

std::string_view to_string(Exclusion e) {
  switch (e) {
    case Exclusion::none: return "none";
    case Exclusion::horizon: return "horizon";
    case Exclusion::below_mask: return "below-mask";
    case Exclusion::geo_arc: return "geo-arc";
  }
  return "?";
}

double orbital_period(double altitude_km, double earth_radius_km) {
  const double a = earth_radius_km + altitude_km;
  return 2.0 * std::numbers::pi * std::sqrt(a * a * a / kEarthMu);
}

double coverage_half_angle(double altitude_km, double elevation_deg, double earth_radius_km) {
  const double el = deg2rad(elevation_deg);
  return std::acos(earth_radius_km * std::cos(el) / (earth_radius_km + altitude_km)) - el;
}

double slant_range(double altitude_km, double elevation_deg, double earth_radius_km) {
  const double el = deg2rad(elevation_deg);
  const double r = earth_radius_km, a = earth_radius_km + altitude_km;
  return std::sqrt(a * a - r * r * std::cos(el) * std::cos(el)) - r * std::sin(el);
}

std::vector<SvState> propagate(const ConstellationConfig& config, double t_s, double earth_radius_km) {
  std::vector<SvState> out;
  out.reserve(static_cast<std::size_t>(config.n_sats()));
  const double theta = kEarthRotationRate * t_s;
  const Eigen::Matrix3d to_fixed = Eigen::AngleAxisd(-theta, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const Eigen::Vector3d spin(0, 0, kEarthRotationRate);

  int id = 0;
  for (std::size_t k = 0; k < config.shells.size(); ++k) {
    const ShellConfig& sh = config.shells[k];
    const double a = earth_radius_km + sh.altitude_km;
    const double mean_motion = std::sqrt(kEarthMu / (a * a * a));
    const double inc = deg2rad(sh.inclination_deg);
    for (int p = 0; p < sh.n_planes; ++p) {
      const double raan = deg2rad(sh.raan_spread_deg * p / sh.n_planes);
      for (int s = 0; s < sh.sats_per_plane; ++s) {
        const double u = deg2rad(360.0 * s / sh.sats_per_plane + sh.phase_offset_deg * p) + mean_motion * t_s;
        const double cu = std::cos(u), su = std::sin(u);
        const double co = std::cos(raan), so = std::sin(raan);
        const double ci = std::cos(inc), si = std::sin(inc);
        const Eigen::Vector3d r(a * (cu * co - su * ci * so), a * (cu * so + su * ci * co), a * su * si);
        const Eigen::Vector3d v = a * mean_motion * Eigen::Vector3d(-su * co - cu * ci * so, -su * so + cu * ci * co, cu * si);
        SvState st;
        st.sv_id = id++;
        st.shell = static_cast<int>(k);
        st.position_km = to_fixed * r;
        st.velocity_km_s = to_fixed * (v - spin.cross(r));
        st.epoch_s = t_s;
        out.push_back(st);
      }
    }
  }
  return out;
}

double geo_arc_separation(const Eigen::Vector3d& site_km, const Eigen::Vector3d& los_unit) {
  auto angle_at = [&](double lon) {
    const Eigen::Vector3d g(kGeoRadiusKm * std::cos(lon), kGeoRadiusKm * std::sin(lon), 0.0);
    const double c = los_unit.dot((g - site_km).normalized());
    return std::acos(std::clamp(c, -1.0, 1.0));
  };
  constexpr int kCoarse = 72;
  const double step = 2.0 * std::numbers::pi / kCoarse;
  int best = 0;
  double best_val = angle_at(0.0);
  for (int i = 1; i < kCoarse; ++i) {
    const double v = angle_at(i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement within one coarse step either side.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best - 1) * step, hi = (best + 1) * step;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = angle_at(x1), f2 = angle_at(x2);
  for (int it = 0; it < 48; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = angle_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = angle_at(x2);
    }
  }
  return std::min({best_val, f1, f2});
}

namespace {

struct Enu {
  Eigen::Vector3d east, north, up;
};

Enu enu_basis(GeoPoint site) {
  const double la = deg2rad(site.lat_deg), lo = deg2rad(site.lon_deg);
  return {{-std::sin(lo), std::cos(lo), 0.0},
          {-std::sin(la) * std::cos(lo), -std::sin(la) * std::sin(lo), std::cos(la)},
          {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)}};
}

}  // namespace

LineOfSight line_of_sight(const SvState& sv, GeoPoint site, const GridParams& grid, double geo_mask_halfwidth_deg) {
  const Enu b = enu_basis(site);
  const Eigen::Vector3d site_km = grid.earth_radius_km * b.up;
  const Eigen::Vector3d d = sv.position_km - site_km;
  const double range = d.norm();
  const Eigen::Vector3d u = d / range;

  LineOfSight los;
  los.sv_id = sv.sv_id;
  los.range_km = range;
  los.elevation_deg = rad2deg(std::asin(std::clamp(u.dot(b.up), -1.0, 1.0)));
  double az = rad2deg(std::atan2(u.dot(b.east), u.dot(b.north)));
  los.azimuth_deg = az < 0 ? az + 360.0 : az;

  if (los.elevation_deg < 0.0) los.excluded = Exclusion::horizon;
  else if (los.elevation_deg < grid.min_elevation_deg) los.excluded = Exclusion::below_mask;
  else if (geo_mask_halfwidth_deg > 0 && geo_arc_separation(site_km, u) < deg2rad(geo_mask_halfwidth_deg))
    los.excluded = Exclusion::geo_arc;
  return los;
}

std::vector<LineOfSight> visible_svs(std::span<const SvState> states, const Cell& cell, const GridParams& grid,
                                     double geo_mask_halfwidth_deg) {
  std::vector<LineOfSight> out;
  out.reserve(states.size());
  for (const auto& sv : states) out.push_back(line_of_sight(sv, cell.center, grid, geo_mask_halfwidth_deg));
  return out;
}

Eigen::Vector3d goal_direction(int s, int n, double goal_elevation_deg) {
  if (s == 1) return {0.0, 0.0, 1.0};
  double az_deg;
  if (s <= 5) {
    az_deg = 90.0 * (s - 2);  // north, east, south, west
  } else {
    const int extra = n - 5;
    az_deg = 360.0 * ((s - 6) + 0.5) / extra;
  }
  const double el = deg2rad(goal_elevation_deg), az = deg2rad(az_deg);
  return {std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el)};
}

std::vector<std::vector<int>> select_diverse(std::span<const LineOfSight> visible, int n, double goal_elevation_deg,
                                             int cell_id) {
  if (n < 4) throw ParameterError("select_diverse: n must be >= 4");
  std::vector<std::pair<int, Eigen::Vector3d>> usable;
  for (const auto& los : visible) {
    if (!los.usable()) continue;
    const double el = deg2rad(los.elevation_deg), az = deg2rad(los.azimuth_deg);
    usable.emplace_back(los.sv_id,
                        Eigen::Vector3d(std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el)));
  }
  if (static_cast<int>(usable.size()) < n)
    throw InsufficientVisibilityError(cell_id, static_cast<int>(usable.size()), n);

  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, int>> scored(usable.size());
  for (int s = 1; s <= n; ++s) {
    const Eigen::Vector3d goal = goal_direction(s, n, goal_elevation_deg);
    for (std::size_t i = 0; i < usable.size(); ++i) scored[i] = {-usable[i].second.dot(goal), usable[i].first};
    std::sort(scored.begin(), scored.end());
    auto& ranked = out[static_cast<std::size_t>(s - 1)];
    ranked.reserve(scored.size());
    for (const auto& [score, id] : scored) ranked.push_back(id);
  }
  return out;
}

double flight_time(const SvState& sv, const Cell& cell, const GridParams& grid) {
  const Eigen::Vector3d center = ecef(cell.center, grid.earth_radius_km);
  if ((sv.position_km - center).dot(center) < 0.0)
    throw GeometryError("SV " + std::to_string(sv.sv_id) + " is below the horizon of cell " + std::to_string(cell.id));
  double best = (sv.position_km - center).norm();
  const double vertex_angle = grid.cell_diameter_km / 2.0 / grid.earth_radius_km;
  if (vertex_angle > 0) {
    for (int k = 0; k < 6; ++k) {
      const GeoPoint v = destination(cell.center, 60.0 * k, vertex_angle);
      best = std::min(best, (sv.position_km - ecef(v, grid.earth_radius_km)).norm());
    }
  }
  return best * 1e3 / kSpeedOfLight;
}

SvIndex::SvIndex(std::span<const SvState> states, double earth_radius_km)
    : states_(states), radius_km_(earth_radius_km) {
  double max_alt = 0.0;
  subpoints_.reserve(states.size());
  for (const auto& sv : states) {
    subpoints_.push_back(geodetic(sv.position_km));
    max_alt = std::max(max_alt, sv.position_km.norm() - earth_radius_km);
  }
  max_half_angle_ = coverage_half_angle(std::max(max_alt, 1e-3), 0.0, earth_radius_km);
  bucket_deg_ = 2.0;
  rows_ = static_cast<int>(std::ceil(180.0 / bucket_deg_));
  cols_ = static_cast<int>(std::ceil(360.0 / bucket_deg_));
  buckets_.assign(static_cast<std::size_t>(rows_ * cols_), {});
  for (std::size_t i = 0; i < subpoints_.size(); ++i) {
    const int r = std::clamp(static_cast<int>(std::floor((subpoints_[i].lat_deg + 90.0) / bucket_deg_)), 0, rows_ - 1);
    const int c = std::clamp(static_cast<int>(std::floor((subpoints_[i].lon_deg + 180.0) / bucket_deg_)), 0, cols_ - 1);
    buckets_[static_cast<std::size_t>(r * cols_ + c)].push_back(static_cast<int>(i));
  }
}

std::vector<LineOfSight> SvIndex::in_view(const Cell& cell, const GridParams& grid, double geo_mask_halfwidth_deg) const {
  const GeoPoint p = cell.center;
  const double ang = max_half_angle_;
  const double lat_lo = p.lat_deg - rad2deg(ang), lat_hi = p.lat_deg + rad2deg(ang);
  const int r0 = std::clamp(static_cast<int>(std::floor((lat_lo + 90.0) / bucket_deg_)), 0, rows_ - 1);
  const int r1 = std::clamp(static_cast<int>(std::floor((lat_hi + 90.0) / bucket_deg_)), 0, rows_ - 1);
  bool all_cols = lat_hi >= 90.0 || lat_lo <= -90.0;
  double dlon = 180.0;
  if (!all_cols) {
    const double s = std::sin(ang) / std::cos(deg2rad(p.lat_deg));
    if (s >= 1.0) all_cols = true;
    else dlon = rad2deg(std::asin(s));
  }
  int c0 = 0, span = cols_;
  if (!all_cols) {
    c0 = static_cast<int>(std::floor((p.lon_deg - dlon + 180.0) / bucket_deg_)) - 1;
    const int c1 = static_cast<int>(std::floor((p.lon_deg + dlon + 180.0) / bucket_deg_)) + 1;
    span = std::min(cols_, c1 - c0 + 1);
  }
  std::vector<int> ids;
  for (int r = r0; r <= r1; ++r)
    for (int k = 0; k < span; ++k) {
      const int c = (((c0 + k) % cols_) + cols_) % cols_;
      for (int i : buckets_[static_cast<std::size_t>(r * cols_ + c)])
        if (central_angle(p, subpoints_[static_cast<std::size_t>(i)]) <= ang) ids.push_back(i);
    }
  std::sort(ids.begin(), ids.end());
  std::vector<LineOfSight> out;
  for (int i : ids) {
    auto los = line_of_sight(states_[static_cast<std::size_t>(i)], p, grid, geo_mask_halfwidth_deg);
    if (los.excluded != Exclusion::horizon) out.push_back(los);
  }
  return out;
}

}  // namespace fusedleo
