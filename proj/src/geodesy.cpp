#include "pedmap/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pedmap {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Bearings closer than this (in degrees on both axes) are coincident.
constexpr double kCoincidentDeg = 1e-12;

double wrap_360(double degrees) {
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) d += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  if (d >= 360.0) d = 0.0;
  return d;
}

}  // namespace

double normalize_longitude(double lon) {
  if (!std::isfinite(lon)) throw Error("longitude is not finite");
  if (lon >= -180.0 && lon < 180.0) return lon;
  double l = std::fmod(lon + 180.0, 360.0);
  if (l < 0.0) l += 360.0;
  l -= 180.0;
  if (l >= 180.0) l = -180.0;
  return l;
}

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(normalize_longitude(lon)) {
  if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
    throw Error("latitude out of range [-90, 90]: " + std::to_string(lat));
  }
}

Heading::Heading(double degrees) {
  if (!std::isfinite(degrees)) throw Error("heading is not finite");
  degrees_ = wrap_360(degrees);
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double lat1 = a.lat() * kDegToRad;
  const double lat2 = b.lat() * kDegToRad;
  const double sin_dlat = std::sin((lat2 - lat1) / 2.0);
  const double sin_dlon = std::sin((b.lon() - a.lon()) * kDegToRad / 2.0);
  double h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

Heading initial_bearing(const GeoPoint& from, const GeoPoint& to) {
  const double dlon_deg = normalize_longitude(to.lon() - from.lon());
  if (std::abs(to.lat() - from.lat()) < kCoincidentDeg && std::abs(dlon_deg) < kCoincidentDeg) {
    throw Error("undefined bearing: coincident points");
  }
  const double lat1 = from.lat() * kDegToRad;
  const double lat2 = to.lat() * kDegToRad;
  const double dlon = dlon_deg * kDegToRad;
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  return Heading(std::atan2(y, x) * kRadToDeg);
}

double angular_separation(const Heading& a, const Heading& b) noexcept {
  const double d = std::abs(a.degrees() - b.degrees());
  return d > 180.0 ? 360.0 - d : d;
}

GeoPoint interpolate_along(const GeoPoint& a, const GeoPoint& b, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error("interpolation fraction outside [0, 1]: " + std::to_string(fraction));
  }
  const double keep = 1.0 - fraction;
  return GeoPoint(keep * a.lat() + fraction * b.lat(), keep * a.lon() + fraction * b.lon());
}

}  // namespace pedmap
