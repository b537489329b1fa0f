#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "georef/gazetteer.hpp"
#include "georef/geometry.hpp"

namespace georef {

/// Distance-interval K function sampled at d = delta_d, 2 delta_d, ..., ceil(max/delta_d) delta_d.
struct KFunctionProfile {
  double delta_d = 100.0;
  std::size_t n = 0;
  double max_distance = 0.0;
  std::vector<double> distances;
  /// K(d) in 1/m^2.
  std::vector<double> values;
  /// Ordered-pair neighbour counts per interval (d - delta_d, d].
  std::vector<std::uint64_t> counts;

  std::size_t size() const noexcept { return values.size(); }
};

/// Throws Error for fewer than two points or a non-positive interval. Bin counting is
/// split over `jobs` threads; counts are integers so the result does not depend on it.
KFunctionProfile k_function(const Eigen::Ref<const Eigen::Matrix2Xd>& points, double delta_d, unsigned jobs = 1);

struct ClusterDistance {
  double distance = 0.0;
  double threshold = 0.0;
  double argmax_distance = 0.0;
  /// All K(d) equal; the rule degenerates to the first interval.
  bool zero_variance = false;
};

/// Smallest d with K(d) >= mean + 3 sigma and d >= argmax K. Throws NoClusterSignal when none.
ClusterDistance cluster_distance(const KFunctionProfile& profile);

struct ClusterPoint {
  Point position;
  std::string place_id;
  std::string entry_id;
};

struct Cluster {
  /// Indices into the clustered point list, ascending.
  std::vector<std::size_t> members;
  /// 1-based position after ranking.
  std::size_t rank = 0;
  SpatialContext context;
};

/// Single-linkage components under dist <= cluster_distance, singletons dropped, ranked by
/// size (desc), bounding-box area (asc), then smallest member entry id.
std::vector<Cluster> compute_clusters(std::span<const ClusterPoint> points, double cluster_distance);

enum class AnchorStatus {
  assigned,
  /// Several of the anchor's entries fell in the chosen cluster.
  ambiguous,
  /// None of the anchor's entries is in any cluster.
  unclustered,
};

struct AnchorAssignment {
  AnchorStatus status = AnchorStatus::unclustered;
  std::optional<std::string> entry_id;
  std::optional<std::size_t> cluster_rank;
  SpatialContext context;
  std::vector<std::string> ambiguous_entries;
};

struct Disambiguation {
  std::map<std::string, AnchorAssignment> assignments;
  std::vector<ClusterPoint> points;
  std::vector<Cluster> clusters;
  std::optional<KFunctionProfile> profile;
  std::optional<ClusterDistance> rule;
  double cluster_distance_used = 0.0;
  /// No usable density signal: every point was treated as one cluster.
  bool single_cluster_fallback = false;
};

using AnchorCandidates = std::map<std::string, std::vector<const GazetteerEntry*>>;

/// Throws Error for an empty candidate map.
Disambiguation disambiguate_anchors(const AnchorCandidates& candidates, double delta_d, unsigned jobs = 1);

}  // namespace georef
