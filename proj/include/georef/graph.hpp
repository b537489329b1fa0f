#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "georef/geometry.hpp"
#include "georef/relation.hpp"

namespace georef {

/// Ground-truth class of a place, used only for evaluation.
enum class PlaceLabel { anchor, gazetteered, non_gazetteered };

std::string_view label_name(PlaceLabel label) noexcept;
std::optional<PlaceLabel> parse_label(std::string_view text) noexcept;

struct Annotation {
  PlaceLabel label = PlaceLabel::gazetteered;
  std::optional<std::string> truth_entry;
  std::optional<Point> truth_point;
};

struct PlaceNode {
  std::string id;
  std::vector<std::string> references;  // non-empty, in stored order
  std::optional<Annotation> annotation;
};

/// Directed locatum -> relatum edge.
struct SpatialEdge {
  std::string locatum;
  std::string relatum;
  RelationKind kind = RelationKind::near;
  std::string source_label;
};

/// Labeled directed multigraph of places. Immutable after construction.
class PlaceGraph {
 public:
  PlaceGraph() = default;
  /// Throws ValidationError on duplicate ids, empty references, self loops or dangling edges.
  PlaceGraph(std::vector<PlaceNode> nodes, std::vector<SpatialEdge> edges);

  const std::vector<PlaceNode>& nodes() const noexcept { return nodes_; }
  const std::vector<SpatialEdge>& edges() const noexcept { return edges_; }

  bool contains(std::string_view id) const;
  /// Throws ValidationError for unknown ids.
  const PlaceNode& node(std::string_view id) const;

  /// Edges leaving `id`, in insertion order.
  std::vector<SpatialEdge> out_edges(std::string_view id) const;
  std::size_t out_degree(std::string_view id) const;

 private:
  std::vector<PlaceNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<SpatialEdge> edges_;
};

struct GraphLoadOptions {
  /// Unknown relation phrases throw in strict mode and drop the edge otherwise.
  bool strict = false;
  const RelationTable* relations = nullptr;  // defaults to the shipped table
};

struct GraphLoad {
  PlaceGraph graph;
  std::vector<std::string> warnings;
};

GraphLoad load_place_graph(std::string_view json_text, const GraphLoadOptions& options = {});
GraphLoad load_place_graph_file(const std::filesystem::path& path, const GraphLoadOptions& options = {});

/// Writes the graph in the loader's schema, with canonical relation labels.
std::string serialize_place_graph(const PlaceGraph& graph);

const std::vector<std::string>& references_of(const PlaceGraph& graph, std::string_view place_id);

/// Edges from `place_id` to any id in `targets`, in insertion order.
std::vector<SpatialEdge> relationships_to(const PlaceGraph& graph, std::string_view place_id,
                                          const std::set<std::string, std::less<>>& targets);

}  // namespace georef
