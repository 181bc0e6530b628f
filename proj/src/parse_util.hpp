#pragma once

#include <string>
#include <string_view>

#include "csv.hpp"
#include "pedmap/geodesy.hpp"

namespace pedmap::detail {

/// Latitude must be in [-90, 90] and longitude in [-180, 180]; 180 wraps to -180.
inline GeoPoint parse_position(std::string_view lat_field, std::string_view lon_field,
                               std::size_t line) {
  const double lat = csv::parse_number<double>(lat_field, line, "latitude");
  const double lon = csv::parse_number<double>(lon_field, line, "longitude");
  if (!(lat >= -90.0 && lat <= 90.0)) {
    throw ParseError(line, "latitude out of range: " + std::string(lat_field));
  }
  if (!(lon >= -180.0 && lon <= 180.0)) {
    throw ParseError(line, "longitude out of range: " + std::string(lon_field));
  }
  return GeoPoint(lat, lon);
}

}  // namespace pedmap::detail
