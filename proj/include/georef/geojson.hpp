#pragma once

#include <functional>

#include <json.hpp>

#include "georef/geometry.hpp"

namespace georef {

/// Local equirectangular projection about a WGS84 origin; planar output in meters.
/// Affine per axis, so containment tests give the same answer in either space.
struct Projection {
  static constexpr double kEarthRadius = 6371008.8;

  double lon0 = 0.0;
  double lat0 = 0.0;

  Point forward(const Point& lonlat) const;
  Point inverse(const Point& xy) const;
};

using CoordinateMap = std::function<Point(const Point&)>;

/// Point / LineString / Polygon. Throws GeometryError on other types or invalid shapes.
Footprint footprint_from_geojson(const nlohmann::json& geometry, const CoordinateMap& map = {});
nlohmann::json footprint_to_geojson(const Footprint& footprint, const CoordinateMap& map = {});

/// Polygon or MultiPolygon.
nlohmann::json region_to_geojson(const Region& region, const CoordinateMap& map = {});
Region region_from_geojson(const nlohmann::json& geometry, const CoordinateMap& map = {});

}  // namespace georef
