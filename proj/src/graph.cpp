#include "georef/graph.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "georef/errors.hpp"
#include "georef/text.hpp"

namespace georef {

using nlohmann::json;

std::string_view label_name(PlaceLabel label) noexcept {
  switch (label) {
    case PlaceLabel::anchor: return "anchor";
    case PlaceLabel::gazetteered: return "gazetteered";
    case PlaceLabel::non_gazetteered: return "non-gazetteered";
  }
  return "";
}

std::optional<PlaceLabel> parse_label(std::string_view text) noexcept {
  if (text == "anchor") return PlaceLabel::anchor;
  if (text == "gazetteered") return PlaceLabel::gazetteered;
  if (text == "non-gazetteered" || text == "non_gazetteered") return PlaceLabel::non_gazetteered;
  return std::nullopt;
}

PlaceGraph::PlaceGraph(std::vector<PlaceNode> nodes, std::vector<SpatialEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.id.empty()) throw ValidationError("place node with empty id");
    if (node.references.empty()) throw ValidationError("place '" + node.id + "' has no references");
    for (const auto& ref : node.references) {
      if (trim(ref).empty()) throw ValidationError("place '" + node.id + "' has an empty reference");
    }
    if (!index_.emplace(node.id, i).second) throw ValidationError("duplicate place id '" + node.id + "'");
  }
  for (const auto& e : edges_) {
    if (!index_.contains(e.locatum)) throw ValidationError("edge locatum '" + e.locatum + "' is not a declared node");
    if (!index_.contains(e.relatum)) throw ValidationError("edge relatum '" + e.relatum + "' is not a declared node");
    if (e.locatum == e.relatum) throw ValidationError("self-referencing edge on '" + e.locatum + "'");
  }
}

bool PlaceGraph::contains(std::string_view id) const { return index_.contains(std::string(id)); }

const PlaceNode& PlaceGraph::node(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw ValidationError("unknown place id '" + std::string(id) + "'");
  return nodes_[it->second];
}

std::vector<SpatialEdge> PlaceGraph::out_edges(std::string_view id) const {
  node(id);
  std::vector<SpatialEdge> out;
  for (const auto& e : edges_) {
    if (e.locatum == id) out.push_back(e);
  }
  return out;
}

std::size_t PlaceGraph::out_degree(std::string_view id) const {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.locatum == id ? 1 : 0;
  return n;
}

namespace {

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ValidationError(where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

Annotation parse_annotation(const json& a, const std::string& where) {
  if (!a.is_object()) throw ValidationError(where + ": annotation must be an object");
  Annotation out;
  const auto label = parse_label(require_string(a, "label", where));
  if (!label) throw ValidationError(where + ": unknown annotation label");
  out.label = *label;
  if (auto it = a.find("truth_entry"); it != a.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError(where + ": truth_entry must be a string");
    out.truth_entry = it->get<std::string>();
  }
  if (auto it = a.find("truth_point"); it != a.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      throw ValidationError(where + ": truth_point must be [x, y]");
    }
    out.truth_point = Point((*it)[0].get<double>(), (*it)[1].get<double>());
  }
  return out;
}

}  // namespace

GraphLoad load_place_graph(std::string_view json_text, const GraphLoadOptions& options) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed place graph document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("place graph document must be a JSON object");
  const RelationTable& table = options.relations ? *options.relations : RelationTable::defaults();

  GraphLoad out;
  std::vector<PlaceNode> nodes;
  std::vector<SpatialEdge> edges;

  const auto nodes_it = doc.find("nodes");
  if (nodes_it != doc.end()) {
    if (!nodes_it->is_array()) throw ValidationError("'nodes' must be an array");
    for (std::size_t i = 0; i < nodes_it->size(); ++i) {
      const auto& n = (*nodes_it)[i];
      const std::string where = "nodes[" + std::to_string(i) + "]";
      if (!n.is_object()) throw ValidationError(where + " must be an object");
      PlaceNode node;
      node.id = require_string(n, "id", where);
      const auto refs = n.find("references");
      if (refs == n.end() || !refs->is_array()) throw ValidationError(where + ": 'references' must be an array");
      for (const auto& r : *refs) {
        if (!r.is_string()) throw ValidationError(where + ": references must be strings");
        node.references.push_back(std::string(trim(r.get<std::string>())));
      }
      if (auto a = n.find("annotation"); a != n.end() && !a->is_null()) node.annotation = parse_annotation(*a, where);
      nodes.push_back(std::move(node));
    }
  }

  const auto edges_it = doc.find("edges");
  if (edges_it != doc.end()) {
    if (!edges_it->is_array()) throw ValidationError("'edges' must be an array");
    for (std::size_t i = 0; i < edges_it->size(); ++i) {
      const auto& e = (*edges_it)[i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ValidationError(where + " must be an object");
      SpatialEdge edge;
      edge.locatum = require_string(e, "locatum", where);
      edge.relatum = require_string(e, "relatum", where);
      edge.source_label = require_string(e, "relation", where);
      try {
        edge.kind = table.normalize(edge.source_label);
      } catch (const UnknownRelation& err) {
        if (options.strict) throw ValidationError(where + ": " + err.what());
        out.warnings.push_back(where + ": dropped edge " + edge.locatum + " -> " + edge.relatum + " (" + err.what() + ")");
        continue;
      }
      edges.push_back(std::move(edge));
    }
  }

  out.graph = PlaceGraph(std::move(nodes), std::move(edges));
  return out;
}

GraphLoad load_place_graph_file(const std::filesystem::path& path, const GraphLoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read place graph '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_place_graph(buf.str(), options);
}

std::string serialize_place_graph(const PlaceGraph& graph) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& n : graph.nodes()) {
    json node{{"id", n.id}, {"references", n.references}};
    if (n.annotation) {
      json a{{"label", label_name(n.annotation->label)}};
      if (n.annotation->truth_entry) a["truth_entry"] = *n.annotation->truth_entry;
      if (n.annotation->truth_point) a["truth_point"] = {n.annotation->truth_point->x(), n.annotation->truth_point->y()};
      node["annotation"] = std::move(a);
    }
    doc["nodes"].push_back(std::move(node));
  }
  doc["edges"] = json::array();
  for (const auto& e : graph.edges()) {
    doc["edges"].push_back({{"locatum", e.locatum}, {"relation", canonical_label(e.kind)}, {"relatum", e.relatum}});
  }
  return doc.dump(2);
}

const std::vector<std::string>& references_of(const PlaceGraph& graph, std::string_view place_id) {
  return graph.node(place_id).references;
}

std::vector<SpatialEdge> relationships_to(const PlaceGraph& graph, std::string_view place_id,
                                          const std::set<std::string, std::less<>>& targets) {
  graph.node(place_id);
  std::vector<SpatialEdge> out;
  if (targets.empty()) return out;
  for (const auto& e : graph.edges()) {
    if (e.locatum == place_id && targets.contains(e.relatum)) out.push_back(e);
  }
  return out;
}

}  // namespace georef
