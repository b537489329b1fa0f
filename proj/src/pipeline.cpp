#include "georef/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <set>
#include <thread>

#include <json.hpp>

#include "georef/errors.hpp"
#include "georef/geojson.hpp"

namespace georef {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<Method, std::string_view>, 4> kMethodNames = {{
    {Method::anchor, "anchor"},
    {Method::best_match, "best_match"},
    {Method::alr_only, "alr_only"},
    {Method::unresolved, "unresolved"},
}};

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

/// Relation seen from the other end of an edge; nullopt when it has no converse.
std::optional<RelationKind> converse(RelationKind kind) {
  using R = RelationKind;
  switch (kind) {
    case R::north_of: return R::south_of;
    case R::south_of: return R::north_of;
    case R::east_of: return R::west_of;
    case R::west_of: return R::east_of;
    case R::north_east_of: return R::south_west_of;
    case R::south_west_of: return R::north_east_of;
    case R::north_west_of: return R::south_east_of;
    case R::south_east_of: return R::north_west_of;
    case R::near: return R::near;
    case R::in_front_of:
    case R::behind:
    case R::left_of:
    case R::right_of: return std::nullopt;
    default: return topological_converse(kind);
  }
}

struct Located {
  Footprint footprint;
  SpatialContext context;
  std::string how;
  std::string entry_id;  // "anchor" or "best_match"
};

/// A relationship of `place` to a located place, oriented with `place` as locatum.
struct Link {
  RelationKind kind;
  std::string other;
  std::string label;
};

std::vector<Link> links_of(const PlaceGraph& graph, const std::string& place,
                           const std::map<std::string, Located>& located) {
  std::vector<Link> out;
  for (const auto& e : graph.edges()) {
    if (e.locatum == place && located.contains(e.relatum)) {
      out.push_back({e.kind, e.relatum, e.source_label});
    } else if (e.relatum == place && located.contains(e.locatum)) {
      if (auto k = converse(e.kind)) out.push_back({*k, e.locatum, e.source_label + " (converse)"});
    }
  }
  return out;
}

std::vector<Constraint> constraints_for(const std::vector<Link>& links, const std::map<std::string, Located>& located,
                                        const PipelineConfig& cfg) {
  std::vector<Constraint> out;
  for (const auto& l : links) {
    const auto& loc = located.at(l.other);
    std::optional<double> bearing;
    if (auto it = cfg.front_bearings.find(l.other); it != cfg.front_bearings.end()) bearing = it->second;
    out.push_back({l.kind, Relatum{l.other, loc.footprint, loc.context, bearing, loc.entry_id}, l.label});
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string_view method_name(Method method) noexcept {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unresolved";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
  for (const auto& [m, name] : kMethodNames) {
    if (name == text) return m;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (!(delta_d > 0.0)) throw ValidationError("delta_d must be positive");
  spatial.validate();
  if (!(weights.reference >= 0.0 && weights.spatial >= 0.0) || !(weights.reference + weights.spatial > 0.0)) {
    throw ValidationError("similarity weights must be non-negative and not both zero");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("threshold must lie in [0, 1]");
}

std::size_t PipelineRun::anchor_count() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& r) { return r.method == Method::anchor; }));
}

AnchorCandidates identify_anchors(const PlaceGraph& graph, const Gazetteer& gazetteer) {
  AnchorCandidates out;
  for (const auto& node : graph.nodes()) {
    std::vector<const GazetteerEntry*> hits;
    std::set<std::string> seen;
    for (const auto& ref : node.references) {
      for (const auto* e : gazetteer.lookup_exact(ref)) {
        if (seen.insert(e->id).second) hits.push_back(e);
      }
    }
    if (!hits.empty()) {
      std::sort(hits.begin(), hits.end(), [](auto* a, auto* b) { return a->id < b->id; });
      out.emplace(node.id, std::move(hits));
    }
  }
  return out;
}

void classify(std::vector<GeoreferenceResult>& results, double threshold) {
  for (auto& r : results) {
    r.threshold = threshold;
    if (!r.score || r.method == Method::anchor) continue;
    r.method = *r.score >= threshold ? Method::best_match : Method::alr_only;
  }
}

PipelineRun georeference(const PlaceGraph& graph, const Gazetteer& gazetteer, const PipelineConfig& cfg) {
  cfg.validate();
  const SemanticDictionary& dict = cfg.dictionary ? *cfg.dictionary : SemanticDictionary::defaults();
  const MatchWeights weights = MatchWeights::normalized(cfg.weights.reference, cfg.weights.spatial);

  PipelineRun run;
  std::map<std::string, GeoreferenceResult> by_id;
  for (const auto& node : graph.nodes()) {
    auto& r = by_id[node.id];
    r.place_id = node.id;
    r.references = node.references;
    r.threshold = cfg.threshold;
  }

  // Stage 1: anchors.
  run.anchors = identify_anchors(graph, gazetteer);
  std::map<std::string, Located> located;
  if (!run.anchors.empty()) {
    run.disambiguation = disambiguate_anchors(run.anchors, cfg.delta_d, cfg.jobs);
    const auto& dis = *run.disambiguation;
    for (const auto& [place, entries] : run.anchors) {
      auto& r = by_id.at(place);
      std::vector<std::string> ids;
      for (const auto* e : entries) ids.push_back(e->id);
      r.provenance.push_back("anchor lookup: " + std::to_string(ids.size()) + " entries [" + join(ids) + "]");
      const auto& a = dis.assignments.at(place);
      const GazetteerEntry* chosen = nullptr;
      switch (a.status) {
        case AnchorStatus::assigned:
          chosen = gazetteer.find(*a.entry_id);
          if (a.cluster_rank) {
            r.provenance.push_back("cluster rank " + std::to_string(*a.cluster_rank) +
                                   fmt(" (cluster distance %.1f m)", dis.cluster_distance_used));
          } else {
            r.provenance.push_back("single entry assigned without clustering");
          }
          break;
        case AnchorStatus::ambiguous:
          r.provenance.push_back("ambiguous in cluster rank " + std::to_string(*a.cluster_rank) + ": [" +
                                 join(a.ambiguous_entries) + "]; deferred to best matching");
          break;
        case AnchorStatus::unclustered:
          r.provenance.push_back("no entry in any cluster; deferred to best matching");
          break;
      }
      if (!chosen) continue;
      r.method = Method::anchor;
      r.entry_id = chosen->id;
      r.footprint = chosen->footprint;
      located.emplace(place, Located{chosen->footprint, a.context, "anchor", chosen->id});
      run.depth[place] = 0;
    }
  }
  if (located.empty()) {
    for (auto& [id, r] : by_id) r.provenance.push_back("no anchor place could be geo-referenced");
    for (const auto& node : graph.nodes()) run.results.push_back(std::move(by_id.at(node.id)));
    return run;
  }

  // Stage 2: best matching by dependency depth; accepted matches are promoted between levels.
  std::set<std::string> processed;
  for (const auto& [id, loc] : located) processed.insert(id);
  for (std::size_t level = 1;; ++level) {
    struct Job {
      std::string id;
      std::vector<Link> links;
    };
    std::vector<Job> frontier;
    for (const auto& node : graph.nodes()) {
      if (processed.contains(node.id)) continue;
      auto links = links_of(graph, node.id, located);
      if (!links.empty()) frontier.push_back({node.id, std::move(links)});
    }
    if (frontier.empty()) break;
    std::stable_sort(frontier.begin(), frontier.end(),
                     [](const Job& a, const Job& b) { return a.links.size() > b.links.size(); });

    std::vector<std::vector<Constraint>> constraints(frontier.size());
    for (std::size_t i = 0; i < frontier.size(); ++i) constraints[i] = constraints_for(frontier[i].links, located, cfg);
    std::vector<std::optional<MatchResult>> scored(frontier.size());
    parallel_for(frontier.size(), cfg.jobs, [&](std::size_t i) {
      scored[i] = best_match(graph.node(frontier[i].id), constraints[i], gazetteer, cfg.spatial, weights, dict);
    });

    std::map<std::string, Located> promoted;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto& job = frontier[i];
      auto& m = *scored[i];
      auto& r = by_id.at(job.id);
      processed.insert(job.id);
      run.depth[job.id] = level;
      std::vector<std::string> rel;
      for (const auto& l : job.links) {
        rel.push_back(std::string(canonical_label(l.kind)) + " " + l.other + " (" + located.at(l.other).how + ")");
      }
      r.provenance.push_back("depth " + std::to_string(level) + ": " + std::to_string(job.links.size()) +
                             " relations [" + join(rel) + "]");
      r.provenance.insert(r.provenance.end(), m.notes.begin(), m.notes.end());
      r.provenance.push_back(fmt("ALR area %.1f m2", m.alr.region.area()));
      r.provenance.push_back("candidates: " + std::to_string(m.candidate_count));
      if (!m.alr.region.empty()) r.alr = m.alr.region;

      if (m.status == MatchStatus::matched) {
        r.entry_id = m.entry_id;
        r.footprint = gazetteer.entry(*m.entry_id).footprint;
        r.score = m.score;
        r.provenance.push_back("best candidate " + *m.entry_id + " via '" + m.best_reference + "'" +
                               fmt(" reference %.3f", m.reference_sim) + fmt(" spatial %.3f", m.spatial_sim) +
                               fmt(" overall %.3f", m.score));
        if (cfg.promotion && m.score >= cfg.threshold) {
          const auto& first = constraints[i].front().relatum;
          promoted.emplace(job.id, Located{*r.footprint, first.context, "best_match", *m.entry_id});
        }
      }
      run.matches.emplace(job.id, std::move(m));
    }
    located.merge(promoted);
    if (!cfg.promotion) break;
  }

  // Stage 3: classification and leftovers.
  for (const auto& node : graph.nodes()) {
    auto& r = by_id.at(node.id);
    if (r.method == Method::anchor) continue;
    if (r.score) {
      r.method = *r.score >= cfg.threshold ? Method::best_match : Method::alr_only;
      r.provenance.push_back(fmt("score %.3f", *r.score) + (r.method == Method::best_match ? " >= " : " < ") +
                             fmt("threshold %.3f", cfg.threshold));
    } else if (r.alr) {
      r.method = Method::alr_only;
    } else {
      r.method = Method::unresolved;
      if (!processed.contains(node.id)) r.provenance.push_back("no relationship to a geo-referenced place");
    }
  }
  for (const auto& node : graph.nodes()) run.results.push_back(std::move(by_id.at(node.id)));
  return run;
}

std::string results_to_geojson(const std::vector<GeoreferenceResult>& results,
                               const std::optional<Projection>& projection) {
  CoordinateMap map;
  if (projection) map = [p = *projection](const Point& xy) { return p.inverse(xy); };
  json features = json::array();
  for (const auto& r : results) {
    json props = json::object();
    props["place_id"] = r.place_id;
    props["method"] = std::string(method_name(r.method));
    props["score"] = r.score ? json(*r.score) : json(nullptr);
    props["threshold"] = r.threshold;
    const bool assigned = r.method == Method::anchor || r.method == Method::best_match;
    if (r.entry_id) props[assigned ? "entry_id" : "candidate_entry"] = *r.entry_id;
    props["references"] = r.references;
    props["provenance"] = r.provenance;
    props["alr"] = r.alr ? region_to_geojson(*r.alr, map) : json(nullptr);
    json geometry = nullptr;
    if (assigned && r.footprint) {
      geometry = footprint_to_geojson(*r.footprint, map);
    } else if (r.method == Method::alr_only && r.alr) {
      geometry = region_to_geojson(*r.alr, map);
    }
    features.push_back({{"type", "Feature"}, {"geometry", geometry}, {"properties", props}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

std::vector<GeoreferenceResult> results_from_geojson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("results: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw ValidationError("results: expected a GeoJSON FeatureCollection");
  }
  std::vector<GeoreferenceResult> out;
  std::set<std::string> seen;
  for (const auto& f : doc["features"]) {
    if (!f.is_object() || !f.contains("properties") || !f["properties"].is_object()) {
      throw ValidationError("results: feature without properties");
    }
    const auto& p = f["properties"];
    GeoreferenceResult r;
    if (!p.contains("place_id") || !p["place_id"].is_string()) throw ValidationError("results: missing place_id");
    r.place_id = p["place_id"].get<std::string>();
    if (!seen.insert(r.place_id).second) throw ValidationError("results: duplicate place_id '" + r.place_id + "'");
    const auto method = parse_method(p.value("method", ""));
    if (!method) throw ValidationError("results: bad method for '" + r.place_id + "'");
    r.method = *method;
    if (p.contains("score") && p["score"].is_number()) r.score = p["score"].get<double>();
    if (p.contains("threshold") && p["threshold"].is_number()) r.threshold = p["threshold"].get<double>();
    if (p.contains("entry_id") && p["entry_id"].is_string()) r.entry_id = p["entry_id"].get<std::string>();
    if (p.contains("candidate_entry") && p["candidate_entry"].is_string()) {
      r.entry_id = p["candidate_entry"].get<std::string>();
    }
    if (p.contains("references") && p["references"].is_array()) {
      r.references = p["references"].get<std::vector<std::string>>();
    }
    if (p.contains("provenance") && p["provenance"].is_array()) {
      r.provenance = p["provenance"].get<std::vector<std::string>>();
    }
    if (p.contains("alr") && p["alr"].is_object()) r.alr = region_from_geojson(p["alr"]);
    const bool assigned = r.method == Method::anchor || r.method == Method::best_match;
    if (assigned && f.contains("geometry") && f["geometry"].is_object()) {
      r.footprint = footprint_from_geojson(f["geometry"]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace georef
