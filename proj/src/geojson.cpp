#include "georef/geojson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "georef/errors.hpp"

namespace georef {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Point map_point(const CoordinateMap& map, const Point& p) { return map ? map(p) : p; }

Point read_position(const json& pos, const CoordinateMap& map) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
    throw GeometryError("GeoJSON position must be [x, y]");
  }
  return map_point(map, Point(pos[0].get<double>(), pos[1].get<double>()));
}

std::vector<Point> read_positions(const json& arr, const CoordinateMap& map) {
  if (!arr.is_array()) throw GeometryError("GeoJSON coordinates must be an array");
  std::vector<Point> out;
  out.reserve(arr.size());
  for (const auto& p : arr) out.push_back(read_position(p, map));
  return out;
}

json write_position(const BPoint& p, const CoordinateMap& map) {
  const Point q = map_point(map, to_point(p));
  return json::array({q.x(), q.y()});
}

template <typename Ring>
json write_ring(const Ring& ring, const CoordinateMap& map) {
  json out = json::array();
  for (const auto& p : ring) out.push_back(write_position(p, map));
  return out;
}

// GeoJSON rings are counter-clockwise outer, clockwise holes.
json write_polygon(const BPolygon& poly, const CoordinateMap& map) {
  json rings = json::array();
  auto outer = poly.outer();
  std::reverse(outer.begin(), outer.end());
  rings.push_back(write_ring(outer, map));
  for (auto inner : poly.inners()) {
    std::reverse(inner.begin(), inner.end());
    rings.push_back(write_ring(inner, map));
  }
  return rings;
}

const json& coordinates_of(const json& geometry) {
  const auto it = geometry.find("coordinates");
  if (it == geometry.end()) throw GeometryError("GeoJSON geometry lacks 'coordinates'");
  return *it;
}

BPolygon read_polygon(const json& rings, const CoordinateMap& map) {
  if (!rings.is_array() || rings.empty()) throw GeometryError("GeoJSON Polygon needs at least one ring");
  BPolygon poly;
  for (std::size_t r = 0; r < rings.size(); ++r) {
    auto& ring = r == 0 ? poly.outer() : (poly.inners().emplace_back(), poly.inners().back());
    for (const auto& p : read_positions(rings[r], map)) ring.push_back(to_bpoint(p));
  }
  bg::correct(poly);
  return poly;
}

}  // namespace

Point Projection::forward(const Point& lonlat) const {
  return {kEarthRadius * (lonlat.x() - lon0) * kDeg * std::cos(lat0 * kDeg), kEarthRadius * (lonlat.y() - lat0) * kDeg};
}

Point Projection::inverse(const Point& xy) const {
  return {lon0 + xy.x() / (kEarthRadius * kDeg * std::cos(lat0 * kDeg)), lat0 + xy.y() / (kEarthRadius * kDeg)};
}

Footprint footprint_from_geojson(const json& geometry, const CoordinateMap& map) {
  if (!geometry.is_object()) throw GeometryError("GeoJSON geometry must be an object");
  const auto type_it = geometry.find("type");
  if (type_it == geometry.end() || !type_it->is_string()) throw GeometryError("GeoJSON geometry lacks 'type'");
  const auto type = type_it->get<std::string>();
  const auto& coords = coordinates_of(geometry);
  if (type == "Point") return Footprint::point(read_position(coords, map));
  if (type == "LineString") {
    const auto pts = read_positions(coords, map);
    return Footprint::polyline(pts);
  }
  if (type == "Polygon") {
    if (!coords.is_array() || coords.empty()) throw GeometryError("GeoJSON Polygon needs at least one ring");
    const auto outer = read_positions(coords[0], map);
    std::vector<std::vector<Point>> holes;
    for (std::size_t i = 1; i < coords.size(); ++i) holes.push_back(read_positions(coords[i], map));
    return Footprint::polygon(outer, holes);
  }
  throw GeometryError("unsupported footprint geometry type '" + type + "'");
}

json footprint_to_geojson(const Footprint& footprint, const CoordinateMap& map) {
  switch (footprint.kind()) {
    case GeometryKind::point:
      return {{"type", "Point"}, {"coordinates", write_position(footprint.as_point(), map)}};
    case GeometryKind::polyline:
      return {{"type", "LineString"}, {"coordinates", write_ring(footprint.as_polyline(), map)}};
    case GeometryKind::polygon:
      return {{"type", "Polygon"}, {"coordinates", write_polygon(footprint.as_polygon(), map)}};
  }
  return nullptr;
}

json region_to_geojson(const Region& region, const CoordinateMap& map) {
  const auto& shape = region.shape();
  if (shape.size() == 1) return {{"type", "Polygon"}, {"coordinates", write_polygon(shape.front(), map)}};
  json polys = json::array();
  for (const auto& p : shape) polys.push_back(write_polygon(p, map));
  return {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}};
}

Region region_from_geojson(const json& geometry, const CoordinateMap& map) {
  if (!geometry.is_object()) throw GeometryError("GeoJSON geometry must be an object");
  const auto type = geometry.value("type", std::string{});
  const auto& coords = coordinates_of(geometry);
  BMultiPolygon mp;
  if (type == "Polygon") {
    mp.push_back(read_polygon(coords, map));
  } else if (type == "MultiPolygon") {
    if (!coords.is_array()) throw GeometryError("GeoJSON MultiPolygon coordinates must be an array");
    for (const auto& rings : coords) mp.push_back(read_polygon(rings, map));
  } else {
    throw GeometryError("region geometry must be Polygon or MultiPolygon, got '" + type + "'");
  }
  return Region(std::move(mp));
}

}  // namespace georef
