#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "georef/clustering.hpp"
#include "georef/gazetteer.hpp"
#include "georef/graph.hpp"
#include "georef/matching.hpp"
#include "georef/spatial.hpp"

namespace georef {

enum class Method { anchor, best_match, alr_only, unresolved };

std::string_view method_name(Method method) noexcept;
std::optional<Method> parse_method(std::string_view text) noexcept;

struct PipelineConfig {
  /// Interval width of the K function, meters.
  double delta_d = 100.0;
  SpatialConfig spatial;
  MatchWeights weights;
  /// Overall similarity needed to accept a best match.
  double threshold = 0.7;
  /// Accepted best matches become relata for places processed after them.
  bool promotion = true;
  unsigned jobs = 1;
  /// Front bearing (deg clockwise from north) of a place, used for relative directions.
  std::map<std::string, double, std::less<>> front_bearings;
  /// Defaults to SemanticDictionary::defaults().
  const SemanticDictionary* dictionary = nullptr;

  /// Throws ValidationError.
  void validate() const;
};

struct GeoreferenceResult {
  std::string place_id;
  std::vector<std::string> references;
  Method method = Method::unresolved;
  /// Assigned entry (anchor, best_match) or the rejected best candidate (alr_only).
  std::optional<std::string> entry_id;
  std::optional<Footprint> footprint;
  std::optional<Region> alr;
  std::optional<double> score;
  double threshold = 0.7;
  std::vector<std::string> provenance;
};

/// Exact-name gazetteer hits per place, deduplicated by entry id; places without hits are omitted.
AnchorCandidates identify_anchors(const PlaceGraph& graph, const Gazetteer& gazetteer);

struct PipelineRun {
  /// One result per graph node, in node order.
  std::vector<GeoreferenceResult> results;
  AnchorCandidates anchors;
  std::optional<Disambiguation> disambiguation;
  std::map<std::string, MatchResult> matches;
  /// Processing depth of every located or scored place; anchors are at depth 0.
  std::map<std::string, std::size_t> depth;

  std::size_t anchor_count() const;
};

PipelineRun georeference(const PlaceGraph& graph, const Gazetteer& gazetteer, const PipelineConfig& config = {});

/// Sets best_match / alr_only on every scored result from its score and `threshold`.
void classify(std::vector<GeoreferenceResult>& results, double threshold);

/// FeatureCollection; coordinates are mapped back with `projection` when given.
std::string results_to_geojson(const std::vector<GeoreferenceResult>& results,
                               const std::optional<Projection>& projection = std::nullopt);

/// Reads coordinates verbatim.
std::vector<GeoreferenceResult> results_from_geojson(std::string_view text);

}  // namespace georef
