#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace georef {

/// Planar position in meters.
using Point = Eigen::Vector2d;
using Box = Eigen::AlignedBox2d;

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BLine = bg::model::linestring<BPoint>;
using BPolygon = bg::model::polygon<BPoint>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;
using BBox = bg::model::box<BPoint>;

inline BPoint to_bpoint(const Point& p) { return {p.x(), p.y()}; }
inline Point to_point(const BPoint& p) { return {p.x(), p.y()}; }

enum class GeometryKind { point, polyline, polygon };

/// Gazetteer footprint: a point, polyline or simple polygon (holes allowed).
/// Construction validates; instances are immutable.
class Footprint {
 public:
  static Footprint point(const Point& p);
  /// At least two distinct vertices.
  static Footprint polyline(std::span<const Point> vertices);
  /// Outer ring with >= 3 distinct vertices; a repeated closing vertex is accepted.
  /// Self-intersecting or zero-area rings throw GeometryError.
  static Footprint polygon(std::span<const Point> outer, const std::vector<std::vector<Point>>& holes = {});

  GeometryKind kind() const noexcept { return kind_; }
  bool is_polygon() const noexcept { return kind_ == GeometryKind::polygon; }

  /// Point itself; arc-length midpoint of a polyline; area-weighted centroid of a polygon.
  const Point& centroid() const noexcept { return centroid_; }
  /// Zero for points and polylines.
  double area() const noexcept { return area_; }
  Box envelope() const noexcept { return envelope_; }

  const BPoint& as_point() const { return std::get<BPoint>(shape_); }
  const BLine& as_polyline() const { return std::get<BLine>(shape_); }
  const BPolygon& as_polygon() const { return std::get<BPolygon>(shape_); }
  const std::variant<BPoint, BLine, BPolygon>& shape() const noexcept { return shape_; }

 private:
  Footprint() = default;
  void finish();

  GeometryKind kind_ = GeometryKind::point;
  std::variant<BPoint, BLine, BPolygon> shape_;
  Point centroid_ = Point::Zero();
  double area_ = 0.0;
  Box envelope_;
};

/// Finite planar region: a set of polygons. `clipped()` marks regions derived from an
/// unbounded set (half-plane, complement) that were cut to a finite window.
class Region {
 public:
  Region() = default;
  explicit Region(BMultiPolygon shape, bool clipped = false);

  static Region from_box(const Box& box);
  static Region from_polygon(const BPolygon& polygon);

  const BMultiPolygon& shape() const noexcept { return shape_; }
  bool clipped() const noexcept { return clipped_; }

  double area() const;
  /// True when the region has no positive-area part.
  bool empty() const;
  Box envelope() const;

  /// Closed containment: boundary points count as inside.
  bool contains(const Point& p) const;
  bool intersects(const Footprint& f) const;
  /// Footprint lies entirely in the closed region.
  bool covers(const Footprint& f) const;

 private:
  BMultiPolygon shape_;
  bool clipped_ = false;
};

Region intersection(const Region& a, const Region& b);
Region unite(const Region& a, const Region& b);

/// Outward buffer of a footprint by `distance`; round joins and caps approximated with
/// `segments` vertices per full circle. The footprint's own extent is included.
Region buffer(const Footprint& footprint, double distance, int segments = 64);

/// Region {p in window : (p - origin) . normal >= 0}.
Region half_plane(const Point& origin, const Point& normal, const Box& window);

/// Minimal bounding box of a cluster's points; scales the near buffer.
struct SpatialContext {
  Box box;

  static SpatialContext around(std::span<const Point> points);
  double area() const { return box.isEmpty() ? 0.0 : box.volume(); }
};

}  // namespace georef
