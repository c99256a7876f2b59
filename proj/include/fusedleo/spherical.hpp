#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace fusedleo {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMu = 398'600.4418;           // km^3/s^2
inline constexpr double kEarthRotationRate = 7.2921159e-5;  // rad/s
inline constexpr double kGeoRadiusKm = 42'164.0;

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

// Wraps to [-180, 180).
inline double wrap_lon_deg(double lon) {
  double w = std::fmod(lon + 180.0, 360.0);
  if (w < 0) w += 360.0;
  return w - 180.0;
}

// Great-circle angle between two points, radians. Haversine form so that
// small separations keep full precision.
inline double central_angle(GeoPoint a, GeoPoint b) {
  const double p1 = deg2rad(a.lat_deg), p2 = deg2rad(b.lat_deg);
  const double dp = p2 - p1;
  const double dl = deg2rad(b.lon_deg - a.lon_deg);
  const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

// Point reached from `from` after travelling `angle` radians on bearing
// `bearing_deg` (clockwise from north).
inline GeoPoint destination(GeoPoint from, double bearing_deg, double angle) {
  const double p1 = deg2rad(from.lat_deg), l1 = deg2rad(from.lon_deg);
  const double b = deg2rad(bearing_deg);
  const double p2 = std::asin(std::sin(p1) * std::cos(angle) +
                              std::cos(p1) * std::sin(angle) * std::cos(b));
  const double l2 = l1 + std::atan2(std::sin(b) * std::sin(angle) * std::cos(p1),
                                    std::cos(angle) - std::sin(p1) * std::sin(p2));
  return {rad2deg(p2), wrap_lon_deg(rad2deg(l2))};
}

inline Eigen::Vector3d unit_vector(GeoPoint p) {
  const double la = deg2rad(p.lat_deg), lo = deg2rad(p.lon_deg);
  return {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
}

inline Eigen::Vector3d ecef(GeoPoint p, double radius_km) { return radius_km * unit_vector(p); }

inline GeoPoint geodetic(const Eigen::Vector3d& v) {
  return {rad2deg(std::atan2(v.z(), std::hypot(v.x(), v.y()))), rad2deg(std::atan2(v.y(), v.x()))};
}

// Half-width in longitude (radians) of the set of points on the parallel at
// `row_lat` lying within `radius` of a point at latitude `center_lat`.
// Returns a negative value when the parallel misses the cap, and pi when the
// whole parallel is inside it.
inline double cap_lon_halfwidth(double center_lat, double row_lat, double radius) {
  const double denom = std::cos(center_lat) * std::cos(row_lat);
  const double num = std::cos(radius) - std::sin(center_lat) * std::sin(row_lat);
  if (denom <= 1e-15) return num <= 0 ? std::numbers::pi : -1.0;
  const double c = num / denom;
  if (c > 1.0) return -1.0;
  if (c <= -1.0) return std::numbers::pi;
  return std::acos(c);
}

}  // namespace fusedleo
