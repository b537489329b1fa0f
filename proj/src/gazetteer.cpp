#include "georef/gazetteer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/geometry/index/rtree.hpp>

#include "georef/errors.hpp"
#include "georef/text.hpp"

namespace georef {

namespace bgi = boost::geometry::index;
using nlohmann::json;

struct Gazetteer::Index {
  using Value = std::pair<BBox, std::size_t>;
  bgi::rtree<Value, bgi::quadratic<16>> tree;
};

namespace {

BBox to_bbox(const Box& b) { return {to_bpoint(b.min()), to_bpoint(b.max())}; }

}  // namespace

Gazetteer::Gazetteer() : index_(std::make_unique<Index>()) {}
Gazetteer::~Gazetteer() = default;
Gazetteer::Gazetteer(Gazetteer&&) noexcept = default;
Gazetteer& Gazetteer::operator=(Gazetteer&&) noexcept = default;

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries, std::optional<Projection> projection)
    : entries_(std::move(entries)), index_(std::make_unique<Index>()), projection_(projection) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<Index::Value> boxes;
  boxes.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.id.empty()) throw ValidationError("gazetteer entry with empty id");
    if (trim(e.name).empty()) throw ValidationError("gazetteer entry '" + e.id + "' has an empty name");
    if (!by_id_.emplace(e.id, i).second) throw ValidationError("duplicate gazetteer entry id '" + e.id + "'");
    by_name_[fold_name(e.name)].push_back(i);
    boxes.emplace_back(to_bbox(e.footprint.envelope()), i);
  }
  index_->tree = decltype(index_->tree)(boxes.begin(), boxes.end());
}

const GazetteerEntry* Gazetteer::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const GazetteerEntry& Gazetteer::entry(std::string_view id) const {
  if (const auto* e = find(id)) return *e;
  throw ValidationError("unknown gazetteer entry '" + std::string(id) + "'");
}

std::vector<const GazetteerEntry*> Gazetteer::lookup_exact(std::string_view reference) const {
  std::vector<const GazetteerEntry*> out;
  const auto it = by_name_.find(fold_name(reference));
  if (it == by_name_.end()) return out;
  for (auto i : it->second) out.push_back(&entries_[i]);
  return out;
}

std::vector<const GazetteerEntry*> Gazetteer::query_region(const Region& region) const {
  std::vector<const GazetteerEntry*> out;
  if (region.empty()) return out;
  std::vector<Index::Value> hits;
  index_->tree.query(bgi::intersects(to_bbox(region.envelope())), std::back_inserter(hits));
  std::vector<std::size_t> ids;
  for (const auto& [box, i] : hits) {
    if (region.intersects(entries_[i].footprint)) ids.push_back(i);
  }
  std::sort(ids.begin(), ids.end());
  for (auto i : ids) out.push_back(&entries_[i]);
  return out;
}

namespace {

std::vector<json> collect_positions(const json& coords) {
  std::vector<json> out;
  if (coords.is_array() && !coords.empty() && coords[0].is_number()) {
    out.push_back(coords);
  } else if (coords.is_array()) {
    for (const auto& c : coords) {
      auto sub = collect_positions(c);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

std::string property_string(const json& props, const char* key, const std::string& where, bool required) {
  const auto it = props.find(key);
  if (it == props.end() || it->is_null()) {
    if (required) throw ValidationError(where + ": missing properties." + key);
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw ValidationError(where + ": properties." + key + " must be a string");
}

}  // namespace

Gazetteer load_gazetteer(std::string_view geojson_text, const GazetteerOptions& options) {
  json doc;
  try {
    doc = json::parse(geojson_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed gazetteer document: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", std::string{}) != "FeatureCollection") {
    throw ValidationError("gazetteer must be a GeoJSON FeatureCollection");
  }
  const auto features = doc.find("features");
  if (features == doc.end() || !features->is_array()) throw ValidationError("FeatureCollection lacks 'features'");

  const bool projected = options.projected || doc.value("projected", false);
  std::optional<Projection> projection;
  CoordinateMap map;
  if (!projected && !features->empty()) {
    // Origin at the mean of all vertex positions.
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const auto& f : *features) {
      if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) continue;
      for (const auto& p : collect_positions(f["geometry"].value("coordinates", json::array()))) {
        if (p.size() >= 2 && p[0].is_number() && p[1].is_number()) {
          sx += p[0].get<double>();
          sy += p[1].get<double>();
          ++n;
        }
      }
    }
    if (n > 0) {
      projection = Projection{sx / static_cast<double>(n), sy / static_cast<double>(n)};
      map = [proj = *projection](const Point& p) { return proj.forward(p); };
    }
  }

  std::vector<GazetteerEntry> entries;
  entries.reserve(features->size());
  for (std::size_t i = 0; i < features->size(); ++i) {
    const auto& f = (*features)[i];
    const std::string where = "features[" + std::to_string(i) + "]";
    if (!f.is_object()) throw ValidationError(where + " must be an object");
    const auto props_it = f.find("properties");
    if (props_it == f.end() || !props_it->is_object()) throw ValidationError(where + ": missing properties");
    const auto& props = *props_it;
    GazetteerEntry e{.id = property_string(props, "id", where, true),
                     .name = property_string(props, "name", where, true),
                     .feature_type = property_string(props, "feature_type", where, false),
                     .footprint = Footprint::point(Point::Zero()),
                     .tags = {}};
    if (auto tags = props.find("tags"); tags != props.end() && !tags->is_null()) {
      if (!tags->is_object()) throw ValidationError(where + ": properties.tags must be an object");
      for (const auto& [k, v] : tags->items()) {
        if (!v.is_string()) throw ValidationError(where + ": tag '" + k + "' must be a string");
        e.tags.emplace(k, v.get<std::string>());
      }
    }
    const auto geom = f.find("geometry");
    if (geom == f.end() || geom->is_null()) throw GeometryError(where + ": missing geometry");
    try {
      e.footprint = footprint_from_geojson(*geom, map);
    } catch (const GeometryError& err) {
      throw GeometryError(where + " (" + e.id + "): " + err.what());
    }
    entries.push_back(std::move(e));
  }
  return Gazetteer(std::move(entries), projection);
}

Gazetteer load_gazetteer_file(const std::filesystem::path& path, const GazetteerOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read gazetteer '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_gazetteer(buf.str(), options);
}

}  // namespace georef
