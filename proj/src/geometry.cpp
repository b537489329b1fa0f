#include "georef/geometry.hpp"

#include <cmath>
#include <string>

#include "georef/errors.hpp"

namespace georef {
namespace {

constexpr double kEmptyArea = 1e-9;

std::vector<Point> open_ring(std::span<const Point> ring) {
  std::vector<Point> out(ring.begin(), ring.end());
  if (out.size() >= 2 && out.front() == out.back()) out.pop_back();
  return out;
}

void fill_ring(bg::model::ring<BPoint>& ring, std::span<const Point> vertices) {
  for (const auto& v : vertices) ring.push_back(to_bpoint(v));
  ring.push_back(to_bpoint(vertices.front()));
}

std::size_t distinct_count(const std::vector<Point>& pts) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i && !seen; ++j) seen = pts[j] == pts[i];
    if (!seen) ++n;
  }
  return n;
}

Box to_box(const BBox& b) { return Box(Point(b.min_corner().x(), b.min_corner().y()), Point(b.max_corner().x(), b.max_corner().y())); }

}  // namespace

Footprint Footprint::point(const Point& p) {
  if (!p.allFinite()) throw GeometryError("point coordinates must be finite");
  Footprint f;
  f.kind_ = GeometryKind::point;
  f.shape_ = to_bpoint(p);
  f.finish();
  return f;
}

Footprint Footprint::polyline(std::span<const Point> vertices) {
  std::vector<Point> pts(vertices.begin(), vertices.end());
  for (const auto& p : pts) {
    if (!p.allFinite()) throw GeometryError("polyline coordinates must be finite");
  }
  if (distinct_count(pts) < 2) throw GeometryError("polyline needs at least two distinct vertices");
  Footprint f;
  f.kind_ = GeometryKind::polyline;
  BLine line;
  for (const auto& p : pts) line.push_back(to_bpoint(p));
  f.shape_ = std::move(line);
  f.finish();
  return f;
}

Footprint Footprint::polygon(std::span<const Point> outer, const std::vector<std::vector<Point>>& holes) {
  const auto ring = open_ring(outer);
  for (const auto& p : ring) {
    if (!p.allFinite()) throw GeometryError("polygon coordinates must be finite");
  }
  if (distinct_count(ring) < 3) throw GeometryError("polygon ring needs at least three distinct vertices");
  BPolygon poly;
  fill_ring(poly.outer(), ring);
  for (const auto& hole : holes) {
    const auto h = open_ring(hole);
    if (distinct_count(h) < 3) throw GeometryError("polygon hole needs at least three distinct vertices");
    poly.inners().emplace_back();
    fill_ring(poly.inners().back(), h);
  }
  bg::correct(poly);
  std::string reason;
  if (!bg::is_valid(poly, reason)) throw GeometryError("invalid polygon: " + reason);
  if (!(bg::area(poly) > 0.0)) throw GeometryError("polygon area must be positive");
  Footprint f;
  f.kind_ = GeometryKind::polygon;
  f.shape_ = std::move(poly);
  f.finish();
  return f;
}

void Footprint::finish() {
  std::visit(
      [this](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        BBox env;
        bg::envelope(g, env);
        envelope_ = to_box(env);
        if constexpr (std::is_same_v<G, BPoint>) {
          centroid_ = to_point(g);
          area_ = 0.0;
        } else if constexpr (std::is_same_v<G, BLine>) {
          const double total = bg::length(g);
          double walked = 0.0;
          centroid_ = to_point(g.front());
          for (std::size_t i = 1; i < g.size(); ++i) {
            const Point a = to_point(g[i - 1]);
            const Point b = to_point(g[i]);
            const double seg = (b - a).norm();
            if (walked + seg >= total / 2.0 && seg > 0.0) {
              centroid_ = a + (b - a) * ((total / 2.0 - walked) / seg);
              break;
            }
            walked += seg;
          }
          area_ = 0.0;
        } else {
          BPoint c{0.0, 0.0};
          bg::centroid(g, c);
          centroid_ = to_point(c);
          area_ = bg::area(g);
        }
      },
      shape_);
}

Region::Region(BMultiPolygon shape, bool clipped) : shape_(std::move(shape)), clipped_(clipped) {
  bg::unique(shape_);
}

Region Region::from_box(const Box& box) {
  BPolygon poly;
  const Point lo = box.min();
  const Point hi = box.max();
  poly.outer() = {{lo.x(), lo.y()}, {lo.x(), hi.y()}, {hi.x(), hi.y()}, {hi.x(), lo.y()}, {lo.x(), lo.y()}};
  bg::correct(poly);
  BMultiPolygon mp;
  mp.push_back(std::move(poly));
  return Region(std::move(mp));
}

Region Region::from_polygon(const BPolygon& polygon) {
  BMultiPolygon mp;
  mp.push_back(polygon);
  return Region(std::move(mp));
}

double Region::area() const { return bg::area(shape_); }

bool Region::empty() const { return shape_.empty() || area() <= kEmptyArea; }

Box Region::envelope() const {
  if (shape_.empty()) return Box();
  BBox env;
  bg::envelope(shape_, env);
  return to_box(env);
}

bool Region::contains(const Point& p) const { return bg::covered_by(to_bpoint(p), shape_); }

bool Region::intersects(const Footprint& f) const {
  return std::visit([this](const auto& g) { return bg::intersects(g, shape_); }, f.shape());
}

bool Region::covers(const Footprint& f) const {
  return std::visit([this](const auto& g) { return bg::covered_by(g, shape_); }, f.shape());
}

Region intersection(const Region& a, const Region& b) {
  BMultiPolygon out;
  bg::intersection(a.shape(), b.shape(), out);
  return Region(std::move(out), a.clipped() && b.clipped());
}

Region unite(const Region& a, const Region& b) {
  BMultiPolygon out;
  bg::union_(a.shape(), b.shape(), out);
  return Region(std::move(out), a.clipped() || b.clipped());
}

Region buffer(const Footprint& footprint, double distance, int segments) {
  namespace bs = bg::strategy::buffer;
  const bs::distance_symmetric<double> dist(distance);
  const bs::join_round join(segments);
  const bs::end_round end(segments);
  const bs::point_circle circle(segments);
  const bs::side_straight side;
  BMultiPolygon out;
  std::visit([&](const auto& g) { bg::buffer(g, out, dist, side, join, end, circle); }, footprint.shape());
  return Region(std::move(out));
}

Region half_plane(const Point& origin, const Point& normal, const Box& window) {
  // Sutherland-Hodgman clip of the window rectangle against one line.
  const Point lo = window.min();
  const Point hi = window.max();
  const std::vector<Point> rect = {{lo.x(), lo.y()}, {hi.x(), lo.y()}, {hi.x(), hi.y()}, {lo.x(), hi.y()}};
  const auto side = [&](const Point& p) { return (p - origin).dot(normal); };
  std::vector<Point> kept;
  for (std::size_t i = 0; i < rect.size(); ++i) {
    const Point& cur = rect[i];
    const Point& nxt = rect[(i + 1) % rect.size()];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc >= 0.0) kept.push_back(cur);
    if ((sc >= 0.0) != (sn >= 0.0)) kept.push_back(cur + (nxt - cur) * (sc / (sc - sn)));
  }
  if (kept.size() < 3) return Region(BMultiPolygon{}, true);
  BPolygon poly;
  for (const auto& p : kept) poly.outer().push_back(to_bpoint(p));
  poly.outer().push_back(to_bpoint(kept.front()));
  bg::correct(poly);
  if (!(bg::area(poly) > 0.0)) return Region(BMultiPolygon{}, true);
  BMultiPolygon mp;
  mp.push_back(std::move(poly));
  return Region(std::move(mp), true);
}

SpatialContext SpatialContext::around(std::span<const Point> points) {
  SpatialContext ctx;
  for (const auto& p : points) ctx.box.extend(p);
  return ctx;
}

}  // namespace georef
