#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "georef/gazetteer.hpp"
#include "georef/graph.hpp"
#include "georef/pipeline.hpp"

namespace georef {

/// Ground truth per place id.
struct AnnotationSet {
  std::map<std::string, Annotation, std::less<>> places;

  /// Throws ValidationError when a label lacks its truth field.
  void validate() const;
};

/// `{"places": [{"id", "label", "truth_entry"?, "truth_point"?: [x, y]}]}`.
AnnotationSet load_annotations(std::string_view json_text);
AnnotationSet load_annotations_file(const std::filesystem::path& path);
/// Annotations embedded in graph nodes.
AnnotationSet annotations_from_graph(const PlaceGraph& graph);

/// Throws ValidationError listing ids present on only one side.
void check_coverage(const std::vector<GeoreferenceResult>& results, const AnnotationSet& annotations);

struct Ratio {
  std::size_t hits = 0;
  std::size_t total = 0;

  /// nullopt for an empty denominator.
  std::optional<double> value() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(total);
  }
};

/// Anchor results whose entry equals the truth, over all annotated anchors.
Ratio precision_anchors(const std::vector<GeoreferenceResult>& results, const AnnotationSet& annotations);

/// Places of `label` whose ALR covers their truth (entry footprint or point); closed regions.
/// Annotated anchors that were routed to best matching count with the gazetteered places.
/// `gazetteer` supplies truth footprints and is required for the gazetteered class.
Ratio alr_precision(const std::vector<GeoreferenceResult>& results, const AnnotationSet& annotations,
                    PlaceLabel label, const Gazetteer* gazetteer);

struct CurvePoint {
  double similarity = 0.0;
  Ratio precision;
};

/// Precision of scored matches with score >= s for s = 0.0, 0.1, ..., 1.0; empty points omitted.
std::vector<CurvePoint> precision_by_similarity(const std::vector<GeoreferenceResult>& results,
                                                const AnnotationSet& annotations);

struct TradeoffRow {
  double threshold = 0.0;
  Ratio gazetteered;
  Ratio non_gazetteered;
};

/// Recall of each class when scored places are classified at each threshold. The population is
/// the annotated places that went through best matching.
std::vector<TradeoffRow> recall_tradeoff(const std::vector<GeoreferenceResult>& results,
                                         const AnnotationSet& annotations, const std::vector<double>& thresholds);

/// first, first + step, ... up to last (inclusive within a small tolerance). Throws ValidationError.
std::vector<double> threshold_range(double first, double last, double step);

}  // namespace georef
