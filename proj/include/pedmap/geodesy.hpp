#pragma once

// Spherical-earth geodesy on WGS84 latitude/longitude pairs.
//
// All functions are pure and thread-safe.

#include "pedmap/error.hpp"

namespace pedmap {

/// Mean earth radius used for every distance computation, in meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Distances below this are treated as coincident positions.
inline constexpr double kCoincidentM = 1e-6;

/// Latitude/longitude in decimal degrees. Latitude is checked to lie in
/// [-90, 90]; longitude is wrapped into [-180, 180).
class GeoPoint {
 public:
  GeoPoint() = default;
  GeoPoint(double lat, double lon);

  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Direction of travel in degrees clockwise from true north, in [0, 360).
class Heading {
 public:
  Heading() = default;
  explicit Heading(double degrees);

  double degrees() const noexcept { return degrees_; }

 private:
  double degrees_ = 0.0;
};

/// Wraps any finite longitude into [-180, 180).
double normalize_longitude(double lon);

/// Great-circle distance in meters.
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Initial great-circle bearing from `from` towards `to`.
/// Throws Error("undefined bearing") when the points coincide.
Heading initial_bearing(const GeoPoint& from, const GeoPoint& to);

/// Smallest absolute difference between two headings, in [0, 180].
double angular_separation(const Heading& a, const Heading& b) noexcept;

/// Linear lat/lon interpolation; fraction 0 yields `a` and 1 yields `b`
/// exactly. Throws Error when fraction is outside [0, 1].
GeoPoint interpolate_along(const GeoPoint& a, const GeoPoint& b, double fraction);

}  // namespace pedmap
