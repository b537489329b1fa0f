#include "georef/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "georef/errors.hpp"

namespace georef {

void NearBufferConfig::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("near buffer alpha must be positive");
  if (!(beta >= 0.0)) throw ValidationError("near buffer beta must be non-negative");
  if (!(gamma >= 0.0)) throw ValidationError("near buffer gamma must be non-negative");
}

void SpatialConfig::validate() const {
  near.validate();
  if (!(window_expansion >= 0.0)) throw ValidationError("window expansion must be non-negative");
  if (!(window_min_pad >= 0.0)) throw ValidationError("window padding must be non-negative");
  if (circle_segments < 8) throw ValidationError("circle approximation needs at least 8 segments");
}

double buffer_distance(const Footprint& relatum, const SpatialContext& context, const NearBufferConfig& cfg) {
  return cfg.alpha + cfg.beta * relatum.area() + cfg.gamma * context.area();
}

Box clipping_window(std::span<const Constraint> constraints, const SpatialConfig& cfg) {
  Box extent;
  double reach = 0.0;
  for (const auto& c : constraints) {
    extent.extend(c.relatum.footprint.envelope());
    if (!c.relatum.context.box.isEmpty()) extent.extend(c.relatum.context.box);
    reach = std::max(reach, buffer_distance(c.relatum.footprint, c.relatum.context, cfg.near));
  }
  if (extent.isEmpty()) return extent;
  const Point size = extent.sizes();
  const Point pad(std::max({cfg.window_expansion * size.x(), cfg.window_min_pad, reach}),
                  std::max({cfg.window_expansion * size.y(), cfg.window_min_pad, reach}));
  return Box(extent.min() - pad, extent.max() + pad);
}

Point cardinal_direction(RelationKind relation) {
  constexpr double h = std::numbers::sqrt2 / 2.0;
  switch (relation) {
    case RelationKind::north_of: return {0.0, 1.0};
    case RelationKind::south_of: return {0.0, -1.0};
    case RelationKind::east_of: return {1.0, 0.0};
    case RelationKind::west_of: return {-1.0, 0.0};
    case RelationKind::north_east_of: return {h, h};
    case RelationKind::south_east_of: return {h, -h};
    case RelationKind::north_west_of: return {-h, h};
    case RelationKind::south_west_of: return {-h, -h};
    default: throw Error("not a cardinal relation: " + std::string(canonical_label(relation)));
  }
}

Point relative_direction(RelationKind relation, double front_bearing_deg) {
  const double b = front_bearing_deg * std::numbers::pi / 180.0;
  const Point front(std::sin(b), std::cos(b));
  switch (relation) {
    case RelationKind::in_front_of: return front;
    case RelationKind::behind: return -front;
    case RelationKind::left_of: return {-front.y(), front.x()};
    case RelationKind::right_of: return {front.y(), -front.x()};
    default: throw Error("not a relative direction: " + std::string(canonical_label(relation)));
  }
}

namespace {

Region cardinal_space(RelationKind relation, const Point& origin, const Box& window) {
  if (!is_composite_direction(relation)) return half_plane(origin, cardinal_direction(relation), window);
  const Point d = cardinal_direction(relation);
  const Region horizontal = half_plane(origin, Point(d.x() > 0 ? 1.0 : -1.0, 0.0), window);
  const Region vertical = half_plane(origin, Point(0.0, d.y() > 0 ? 1.0 : -1.0), window);
  auto out = intersection(horizontal, vertical);
  return Region(out.shape(), true);
}

}  // namespace

SearchSpace search_space(RelationKind relation, const Relatum& relatum, const Box& window, const SpatialConfig& cfg) {
  SearchSpace space{relation, relatum.id, {}, true};
  const Point origin = relatum.footprint.centroid();
  const Region whole = Region(Region::from_box(window).shape(), true);
  switch (family_of(relation)) {
    case RelationFamily::cardinal:
      space.region = cardinal_space(relation, origin, window);
      break;
    case RelationFamily::qualitative_distance: {
      const double d = buffer_distance(relatum.footprint, relatum.context, cfg.near);
      space.region = buffer(relatum.footprint, d, cfg.circle_segments);
      break;
    }
    case RelationFamily::relative_direction: {
      const double d = buffer_distance(relatum.footprint, relatum.context, cfg.near);
      space.region = buffer(relatum.footprint, d, cfg.circle_segments);
      if (relatum.front_bearing_deg) {
        const Point dir = relative_direction(relation, *relatum.front_bearing_deg);
        space.region = intersection(space.region, half_plane(origin, dir, window));
      }
      break;
    }
    case RelationFamily::topological:
      if (!relatum.footprint.is_polygon()) {
        throw NoSearchSpace("no search space for '" + std::string(canonical_label(relation)) +
                            "' with non-polygon relatum '" + relatum.id + "'");
      }
      if (relation == RelationKind::inside || relation == RelationKind::covered_by ||
          relation == RelationKind::equal) {
        space.region = Region::from_polygon(relatum.footprint.as_polygon());
      } else {
        space.region = whole;
        space.constraining = false;
      }
      break;
  }
  return space;
}

int relaxation_priority(RelationKind relation) noexcept {
  switch (family_of(relation)) {
    case RelationFamily::relative_direction: return 0;
    case RelationFamily::cardinal: return 1;
    case RelationFamily::qualitative_distance: return 2;
    case RelationFamily::topological: return 3;
  }
  return 3;
}

Alr derive_alr(std::span<const SearchSpace> spaces, const Box& window) {
  if (spaces.empty()) throw Error("derive_alr needs at least one search space");
  const Region frame = Region(Region::from_box(window).shape(), true);
  Alr out;

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    if (spaces[i].constraining) active.push_back(i);
  }
  if (active.empty()) {
    out.region = frame;
    out.low_confidence = true;
    return out;
  }

  // Spaces that are empty on their own can never be satisfied.
  std::vector<std::size_t> usable;
  for (auto i : active) {
    if (intersection(frame, spaces[i].region).empty()) {
      out.dropped.push_back(i);
    } else {
      usable.push_back(i);
    }
  }
  if (usable.empty()) {
    out.region = intersection(frame, spaces[active.front()].region);
    return out;
  }

  for (;;) {
    Region region = frame;
    for (auto i : usable) region = intersection(region, spaces[i].region);
    if (!region.empty() || usable.size() == 1) {
      out.region = std::move(region);
      return out;
    }
    auto victim = usable.begin();
    for (auto it = usable.begin(); it != usable.end(); ++it) {
      if (relaxation_priority(spaces[*it].relation) <= relaxation_priority(spaces[*victim].relation)) victim = it;
    }
    out.dropped.push_back(*victim);
    usable.erase(victim);
  }
}

double orientation_similarity(const Point& ideal_direction, double max_angle_rad, const Point& locatum,
                              const Point& relatum) {
  const Point v = locatum - relatum;
  if (v.squaredNorm() == 0.0) return 1.0;
  const Point u = ideal_direction.normalized();
  const double cross = u.x() * v.y() - u.y() * v.x();
  const double theta = std::atan2(std::abs(cross), u.dot(v));
  return std::max(0.0, 1.0 - theta / max_angle_rad);
}

double orientation_similarity(RelationKind relation, const Point& locatum, const Point& relatum) {
  const double max_angle = is_composite_direction(relation) ? std::numbers::pi / 4.0 : std::numbers::pi / 2.0;
  return orientation_similarity(cardinal_direction(relation), max_angle, locatum, relatum);
}

double nearness_similarity(const Point& locatum, const Footprint& relatum, double d) {
  if (!(d > 0.0)) throw Error("buffer distance must be positive");
  return std::clamp(1.0 - (locatum - relatum.centroid()).norm() / d, 0.0, 1.0);
}

std::optional<RelationKind> topological_relation(const Footprint& locatum, const Footprint& relatum) {
  if (!locatum.is_polygon() || !relatum.is_polygon()) return std::nullopt;
  // DE-9IM order: II IB IE BI BB BE EI EB EE
  const std::string m = bg::relation(locatum.as_polygon(), relatum.as_polygon()).str();
  const auto empty = [&](int i) { return m[static_cast<std::size_t>(i)] == 'F'; };
  if (empty(0)) {
    return (empty(1) && empty(3) && empty(4)) ? RelationKind::disjoint : RelationKind::meet;
  }
  const bool a_in_b = empty(2) && empty(5);
  const bool b_in_a = empty(6) && empty(7);
  if (a_in_b && b_in_a) return RelationKind::equal;
  if (a_in_b) return empty(4) ? RelationKind::inside : RelationKind::covered_by;
  if (b_in_a) return empty(4) ? RelationKind::contain : RelationKind::cover;
  return RelationKind::overlap;
}

std::optional<double> topological_similarity(RelationKind relation, const Footprint& locatum,
                                             const Footprint& relatum) {
  if (family_of(relation) != RelationFamily::topological) {
    throw Error("not a topological relation: " + std::string(canonical_label(relation)));
  }
  const auto holds = topological_relation(locatum, relatum);
  if (!holds) return std::nullopt;
  return *holds == relation ? 1.0 : 0.0;
}

SpatialScore spatial_similarity(const Footprint& candidate, std::span<const Constraint> relations,
                                const SpatialConfig& cfg) {
  SpatialScore out;
  double sum = 0.0;
  const Point& here = candidate.centroid();
  for (const auto& c : relations) {
    const Point& there = c.relatum.footprint.centroid();
    const auto coincident = [&] {
      if (here == there) out.notes.push_back("coincident centroids with '" + c.relatum.id + "'; orientation scored 1");
    };
    double sim = 0.0;
    switch (family_of(c.kind)) {
      case RelationFamily::cardinal:
        coincident();
        sim = orientation_similarity(c.kind, here, there);
        break;
      case RelationFamily::qualitative_distance:
        sim = nearness_similarity(here, c.relatum.footprint,
                                  buffer_distance(c.relatum.footprint, c.relatum.context, cfg.near));
        break;
      case RelationFamily::relative_direction: {
        const double near = nearness_similarity(here, c.relatum.footprint,
                                                buffer_distance(c.relatum.footprint, c.relatum.context, cfg.near));
        if (c.relatum.front_bearing_deg) {
          coincident();
          const double orient = orientation_similarity(relative_direction(c.kind, *c.relatum.front_bearing_deg),
                                                       std::numbers::pi / 2.0, here, there);
          sim = (near + orient) / 2.0;
        } else {
          sim = near;
        }
        break;
      }
      case RelationFamily::topological: {
        const auto topo = topological_similarity(c.kind, candidate, c.relatum.footprint);
        if (!topo) {
          ++out.skipped;
          continue;
        }
        if (*topo == 0.0) {
          out.value = 0.0;
          out.filtered = true;
          out.used += 1;
          return out;
        }
        sim = *topo;
        break;
      }
    }
    sum += sim;
    ++out.used;
  }
  if (out.used == 0) {
    out.value = 0.5;
    out.neutral = true;
  } else {
    out.value = sum / static_cast<double>(out.used);
  }
  return out;
}

}  // namespace georef
