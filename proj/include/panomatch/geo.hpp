#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "panomatch/errors.hpp"

namespace panomatch {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

/// Geographic position: either latitude/longitude in degrees or planar
/// coordinates in meters. One convention per run; distances across kinds are
/// rejected.
struct GeoPosition {
  enum class Kind { LatLon, PlanarMeters };

  Kind kind = Kind::PlanarMeters;
  double a = 0.0;  // latitude (deg) or x (m)
  double b = 0.0;  // longitude (deg) or y (m)

  static GeoPosition lat_lon(double lat, double lon) {
    if (!(lat >= -90.0 && lat <= 90.0))
      throw ValidationError("latitude " + std::to_string(lat) + " outside [-90, 90]");
    if (!(lon >= -180.0 && lon <= 180.0))
      throw ValidationError("longitude " + std::to_string(lon) + " outside [-180, 180]");
    return {Kind::LatLon, lat, lon};
  }

  static GeoPosition planar(double x, double y) { return {Kind::PlanarMeters, x, y}; }
};

/// Distance in meters. Planar positions use the Euclidean distance; lat/lon
/// positions use the equirectangular approximation
/// R * sqrt(dphi^2 + (cos(phi_mid) * dlambda)^2), which is accurate to well
/// under a centimeter at the 25 m scales this library cares about.
inline double geo_distance(const GeoPosition& p, const GeoPosition& q) {
  if (p.kind != q.kind) throw ValidationError("geo_distance: mixed coordinate kinds");
  if (p.kind == GeoPosition::Kind::PlanarMeters) return std::hypot(q.a - p.a, q.b - p.b);
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = p.a * deg;
  const double phi2 = q.a * deg;
  const double dphi = phi2 - phi1;
  const double dlam = (q.b - p.b) * deg;
  const double east = std::cos(0.5 * (phi1 + phi2)) * dlam;
  return kEarthRadiusMeters * std::sqrt(dphi * dphi + east * east);
}

}  // namespace panomatch
