#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "georef/geometry.hpp"
#include "georef/relation.hpp"

namespace georef {

/// d = alpha + beta * area(relatum) + gamma * area(context).
struct NearBufferConfig {
  double alpha = 100.0;   // m
  double beta = 1e-3;     // 1/m
  double gamma = 5e-5;    // 1/m

  /// Throws ValidationError unless alpha > 0, beta >= 0, gamma >= 0.
  void validate() const;
};

struct SpatialConfig {
  NearBufferConfig near;
  /// Unbounded spaces are clipped to the relata extent grown by this fraction per side.
  double window_expansion = 0.5;
  /// Lower bound on the per-side window padding, in meters.
  double window_min_pad = 500.0;
  /// Vertices per full circle in buffer approximations.
  int circle_segments = 64;

  void validate() const;
};

/// A geo-referenced place used as the reference object of a relationship.
struct Relatum {
  std::string id;
  Footprint footprint;
  SpatialContext context;
  /// Direction of "front" in degrees clockwise from north, when the reference frame is known.
  std::optional<double> front_bearing_deg;
  /// Gazetteer entry the relatum was assigned, if any; never a candidate for its own locatum.
  std::optional<std::string> entry_id;
};

/// One relationship from the place being located to a geo-referenced relatum.
struct Constraint {
  RelationKind kind = RelationKind::near;
  Relatum relatum;
  std::string label;
};

struct SearchSpace {
  RelationKind relation = RelationKind::near;
  std::string relatum_id;
  Region region;
  /// False for relations whose space is the whole window (overlap, meet, disjoint, ...).
  bool constraining = true;
};

struct Alr {
  Region region;
  /// No constraining space was available; the region is the whole window.
  bool low_confidence = false;
  /// Indices into the input spaces dropped by constraint relaxation, in drop order.
  std::vector<std::size_t> dropped;
};

double buffer_distance(const Footprint& relatum, const SpatialContext& context, const NearBufferConfig& cfg);

/// Finite window every unbounded space is clipped to.
Box clipping_window(std::span<const Constraint> constraints, const SpatialConfig& cfg);

/// Throws NoSearchSpace for a topological relation with a non-polygon relatum.
SearchSpace search_space(RelationKind relation, const Relatum& relatum, const Box& window, const SpatialConfig& cfg);

/// Relaxation order when the intersection is empty: lower drops first.
int relaxation_priority(RelationKind relation) noexcept;

/// Intersection of the constraining spaces within `window`. Empty intersections are
/// relaxed by dropping spaces in relaxation_priority order (latest first among equals).
/// Throws Error on an empty list.
Alr derive_alr(std::span<const SearchSpace> spaces, const Box& window);

/// Unit vector of a cardinal relation.
Point cardinal_direction(RelationKind relation);

/// Ideal direction of a relative relation given the front bearing.
Point relative_direction(RelationKind relation, double front_bearing_deg);

/// 1 - theta/theta_max clamped at 0; theta_max is 90 deg for principal directions and
/// 45 deg for composite ones. Coincident points score 1.
double orientation_similarity(RelationKind relation, const Point& locatum, const Point& relatum);
double orientation_similarity(const Point& ideal_direction, double max_angle_rad, const Point& locatum,
                              const Point& relatum);

/// clamp(1 - |locatum - centroid(relatum)| / d, 0, 1).
double nearness_similarity(const Point& locatum, const Footprint& relatum, double d);

/// The unique topological relation holding between two polygons; nullopt unless both are polygons.
std::optional<RelationKind> topological_relation(const Footprint& locatum, const Footprint& relatum);

/// 1 when `relation` holds, 0 otherwise; nullopt (skip) unless both are polygons.
std::optional<double> topological_similarity(RelationKind relation, const Footprint& locatum,
                                             const Footprint& relatum);

struct SpatialScore {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
  /// Every relation was skipped; value is the neutral 0.5.
  bool neutral = false;
  /// A topological relation failed; value is forced to 0.
  bool filtered = false;
  std::vector<std::string> notes;
};

/// Mean of per-relation scores for a candidate footprint.
SpatialScore spatial_similarity(const Footprint& candidate, std::span<const Constraint> relations,
                                const SpatialConfig& cfg);

}  // namespace georef
