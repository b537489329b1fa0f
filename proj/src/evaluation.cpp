#include "georef/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "georef/errors.hpp"

namespace georef {

namespace {

using nlohmann::json;

const GeoreferenceResult* find_result(const std::vector<GeoreferenceResult>& results, std::string_view id) {
  for (const auto& r : results) {
    if (r.place_id == id) return &r;
  }
  return nullptr;
}

bool went_through_matching(const GeoreferenceResult& r) { return r.alr.has_value() || r.score.has_value(); }

}  // namespace

void AnnotationSet::validate() const {
  for (const auto& [id, a] : places) {
    if (a.label == PlaceLabel::non_gazetteered) {
      if (!a.truth_point) throw ValidationError("annotation '" + id + "': non-gazetteered place needs truth_point");
    } else if (!a.truth_entry) {
      throw ValidationError("annotation '" + id + "': " + std::string(label_name(a.label)) + " needs truth_entry");
    }
  }
}

AnnotationSet load_annotations(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("annotations: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("places") || !doc["places"].is_array()) {
    throw ValidationError("annotations: expected an object with a 'places' array");
  }
  AnnotationSet out;
  for (const auto& p : doc["places"]) {
    if (!p.is_object() || !p.contains("id") || !p["id"].is_string()) throw ValidationError("annotations: entry without id");
    const auto id = p["id"].get<std::string>();
    const auto label = parse_label(p.value("label", ""));
    if (!label) throw ValidationError("annotations: bad label for '" + id + "'");
    Annotation a{*label, std::nullopt, std::nullopt};
    if (p.contains("truth_entry")) {
      if (!p["truth_entry"].is_string()) throw ValidationError("annotations: truth_entry of '" + id + "' must be a string");
      a.truth_entry = p["truth_entry"].get<std::string>();
    }
    if (p.contains("truth_point")) {
      const auto& tp = p["truth_point"];
      if (!tp.is_array() || tp.size() != 2 || !tp[0].is_number() || !tp[1].is_number()) {
        throw ValidationError("annotations: truth_point of '" + id + "' must be [x, y]");
      }
      a.truth_point = Point(tp[0].get<double>(), tp[1].get<double>());
    }
    if (!out.places.emplace(id, a).second) throw ValidationError("annotations: duplicate id '" + id + "'");
  }
  out.validate();
  return out;
}

AnnotationSet load_annotations_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read annotations '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_annotations(buf.str());
}

AnnotationSet annotations_from_graph(const PlaceGraph& graph) {
  AnnotationSet out;
  for (const auto& n : graph.nodes()) {
    if (n.annotation) out.places.emplace(n.id, *n.annotation);
  }
  out.validate();
  return out;
}

void check_coverage(const std::vector<GeoreferenceResult>& results, const AnnotationSet& annotations) {
  std::set<std::string> result_ids;
  for (const auto& r : results) result_ids.insert(r.place_id);
  std::vector<std::string> unannotated, missing;
  for (const auto& id : result_ids) {
    if (!annotations.places.contains(id)) unannotated.push_back(id);
  }
  for (const auto& [id, a] : annotations.places) {
    if (!result_ids.contains(id)) missing.push_back(id);
  }
  if (unannotated.empty() && missing.empty()) return;
  std::string msg = "place ids do not match:";
  if (!unannotated.empty()) {
    msg += " not annotated [";
    for (std::size_t i = 0; i < unannotated.size(); ++i) msg += (i ? ", " : "") + unannotated[i];
    msg += "]";
  }
  if (!missing.empty()) {
    msg += " no result [";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
    msg += "]";
  }
  throw ValidationError(msg);
}

Ratio precision_anchors(const std::vector<GeoreferenceResult>& results, const AnnotationSet& annotations) {
  Ratio out;
  for (const auto& [id, a] : annotations.places) {
    if (a.label != PlaceLabel::anchor) continue;
    ++out.total;
    const auto* r = find_result(results, id);
    if (r && r->method == Method::anchor && r->entry_id && r->entry_id == a.truth_entry) ++out.hits;
  }
  return out;
}

Ratio alr_precision(const std::vector<GeoreferenceResult>& results, const AnnotationSet& annotations,
                    PlaceLabel label, const Gazetteer* gazetteer) {
  Ratio out;
  for (const auto& [id, a] : annotations.places) {
    const auto* r = find_result(results, id);
    bool member = a.label == label;
    if (label == PlaceLabel::gazetteered && a.label == PlaceLabel::anchor) {
      member = r && r->method != Method::anchor && went_through_matching(*r);
    }
    if (!member) continue;
    ++out.total;
    if (!r || !r->alr) continue;
    if (a.label == PlaceLabel::non_gazetteered) {
      if (r->alr->contains(*a.truth_point)) ++out.hits;
      continue;
    }
    if (!gazetteer) throw ValidationError("ALR precision of gazetteered places needs the gazetteer");
    const auto* truth = gazetteer->find(*a.truth_entry);
    if (!truth) throw ValidationError("annotation '" + id + "': unknown truth entry '" + *a.truth_entry + "'");
    if (r->alr->covers(truth->footprint)) ++out.hits;
  }
  return out;
}

std::vector<CurvePoint> precision_by_similarity(const std::vector<GeoreferenceResult>& results,
                                                const AnnotationSet& annotations) {
  std::vector<CurvePoint> out;
  for (int k = 0; k <= 10; ++k) {
    const double s = k / 10.0;
    Ratio ratio;
    for (const auto& r : results) {
      if (r.method == Method::anchor || !r.score || !r.entry_id || *r.score < s) continue;
      const auto it = annotations.places.find(r.place_id);
      if (it == annotations.places.end()) continue;
      ++ratio.total;
      if (it->second.truth_entry == r.entry_id) ++ratio.hits;
    }
    if (ratio.total > 0) out.push_back({s, ratio});
  }
  return out;
}

std::vector<TradeoffRow> recall_tradeoff(const std::vector<GeoreferenceResult>& results,
                                         const AnnotationSet& annotations, const std::vector<double>& thresholds) {
  std::vector<TradeoffRow> out;
  for (double t : thresholds) {
    TradeoffRow row{t, {}, {}};
    for (const auto& r : results) {
      if (r.method == Method::anchor || !went_through_matching(r)) continue;
      const auto it = annotations.places.find(r.place_id);
      if (it == annotations.places.end()) continue;
      const bool says_gazetteered = r.score && *r.score >= t;
      if (it->second.label == PlaceLabel::gazetteered) {
        ++row.gazetteered.total;
        if (says_gazetteered) ++row.gazetteered.hits;
      } else if (it->second.label == PlaceLabel::non_gazetteered) {
        ++row.non_gazetteered.total;
        if (!says_gazetteered) ++row.non_gazetteered.hits;
      }
    }
    out.push_back(row);
  }
  return out;
}

std::vector<double> threshold_range(double first, double last, double step) {
  if (!(step > 0.0) || !(last >= first) || !std::isfinite(first) || !std::isfinite(last)) {
    throw ValidationError("threshold range needs first <= last and a positive step");
  }
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((last - first) / step + 1e-9));
  // Snap to a 1e-12 grid so 0.0:1.0:0.1 yields exactly 0.7 rather than 0.7000000000000001.
  for (long i = 0; i <= n; ++i) out.push_back(std::round((first + static_cast<double>(i) * step) * 1e12) / 1e12);
  return out;
}

}  // namespace georef
