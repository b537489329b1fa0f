#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "georef/geojson.hpp"
#include "georef/geometry.hpp"

namespace georef {

struct GazetteerEntry {
  std::string id;
  std::string name;
  std::string feature_type;
  Footprint footprint;
  std::map<std::string, std::string> tags;
};

struct GazetteerOptions {
  /// Coordinates are already planar meters; otherwise WGS84 lon/lat is projected
  /// about the dataset centroid.
  bool projected = false;
};

/// Immutable gazetteer with normalized-name lookup and an R-tree over footprint envelopes.
class Gazetteer {
 public:
  Gazetteer();
  /// Throws ValidationError on duplicate ids or empty names.
  explicit Gazetteer(std::vector<GazetteerEntry> entries, std::optional<Projection> projection = std::nullopt);
  ~Gazetteer();
  Gazetteer(Gazetteer&&) noexcept;
  Gazetteer& operator=(Gazetteer&&) noexcept;

  std::size_t size() const noexcept { return entries_.size(); }
  /// Sorted by entry id.
  const std::vector<GazetteerEntry>& entries() const noexcept { return entries_; }
  const GazetteerEntry* find(std::string_view id) const;
  /// Throws ValidationError for unknown ids.
  const GazetteerEntry& entry(std::string_view id) const;

  /// Entries whose folded name equals the folded reference. Empty when non-gazetteered.
  std::vector<const GazetteerEntry*> lookup_exact(std::string_view reference) const;

  /// Entries whose footprint intersects the closed region, ordered by entry id.
  std::vector<const GazetteerEntry*> query_region(const Region& region) const;

  /// Set when the source was WGS84 and coordinates were projected on load.
  const std::optional<Projection>& projection() const noexcept { return projection_; }

 private:
  struct Index;

  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
  std::unique_ptr<Index> index_;
  std::optional<Projection> projection_;
};

Gazetteer load_gazetteer(std::string_view geojson_text, const GazetteerOptions& options = {});
Gazetteer load_gazetteer_file(const std::filesystem::path& path, const GazetteerOptions& options = {});

}  // namespace georef
