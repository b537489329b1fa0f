#include <doctest.h>

#include "georef/errors.hpp"
#include "georef/evaluation.hpp"
#include "../support.hpp"

using namespace georef;

namespace {

GeoreferenceResult anchor(std::string id, std::string entry) {
  GeoreferenceResult r;
  r.place_id = std::move(id);
  r.method = Method::anchor;
  r.entry_id = std::move(entry);
  return r;
}

GeoreferenceResult scored(std::string id, std::string entry, double score, double tau = 0.7) {
  GeoreferenceResult r;
  r.place_id = std::move(id);
  r.entry_id = std::move(entry);
  r.score = score;
  r.threshold = tau;
  r.method = score >= tau ? Method::best_match : Method::alr_only;
  r.alr = Region::from_box(Box(Point(0, 0), Point(10, 10)));
  return r;
}

Annotation gazetteered(std::string truth) { return {PlaceLabel::gazetteered, std::move(truth), std::nullopt}; }
Annotation non_gazetteered(Point p) { return {PlaceLabel::non_gazetteered, std::nullopt, p}; }

}  // namespace

TEST_CASE("anchor precision") {
  std::vector<GeoreferenceResult> rs;
  AnnotationSet ann;
  for (int i = 0; i < 15; ++i) {
    const auto id = "a" + std::to_string(i);
    rs.push_back(anchor(id, i == 3 ? "wrong" : "e" + std::to_string(i)));
    ann.places[id] = {PlaceLabel::anchor, "e" + std::to_string(i), std::nullopt};
  }
  const auto p = precision_anchors(rs, ann);
  CHECK(p.total == 15);
  CHECK(p.hits == 14);
  CHECK(*p.value() == doctest::Approx(0.9333).epsilon(1e-4));
  CHECK_FALSE(precision_anchors({}, {}).value());
}

TEST_CASE("alr precision of non-gazetteered places") {
  std::vector<GeoreferenceResult> rs;
  AnnotationSet ann;
  for (int i = 0; i < 20; ++i) {
    const auto id = "n" + std::to_string(i);
    GeoreferenceResult r;
    r.place_id = id;
    r.method = Method::alr_only;
    const double x = 100.0 * i;
    r.alr = Region::from_box(Box(Point(x, 0), Point(x + 50, 50)));
    rs.push_back(r);
    // four truths fall outside; one sits exactly on the boundary
    const Point truth = i < 4 ? Point(x + 60, 25) : i == 4 ? Point(x + 50, 25) : Point(x + 10, 10);
    ann.places[id] = non_gazetteered(truth);
  }
  const auto p = alr_precision(rs, ann, PlaceLabel::non_gazetteered, nullptr);
  CHECK(p.hits == 16);
  CHECK(p.total == 20);
  CHECK(*p.value() == doctest::Approx(0.8));
}

TEST_CASE("alr precision of gazetteered places needs footprints") {
  const auto gaz = testing::sample_gazetteer();
  GeoreferenceResult r = scored("b", "federation-square", 0.9);
  r.alr = Region::from_box(Box(Point(0, -100), Point(300, 100)));
  GeoreferenceResult whole = scored("c", "kirra-galleries", 0.9);
  whole.alr = Region::from_box(Box(Point(-1000, -1000), Point(1000, 1000)));
  AnnotationSet ann;
  ann.places["b"] = gazetteered("federation-square");
  ann.places["c"] = {PlaceLabel::anchor, "flinders-street-station", std::nullopt};  // routed to matching
  const auto p = alr_precision({r, whole}, ann, PlaceLabel::gazetteered, &gaz);
  CHECK(p.total == 2);
  CHECK(p.hits == 2);
  CHECK_THROWS_AS(alr_precision({r}, ann, PlaceLabel::gazetteered, nullptr), ValidationError);
}

TEST_CASE("precision by similarity equals a recount") {
  testing::Rng rng(31);
  std::vector<GeoreferenceResult> rs;
  AnnotationSet ann;
  for (int i = 0; i < 80; ++i) {
    const auto id = "p" + std::to_string(i);
    const double s = rng.uniform(0.0, 0.95);
    const bool right = rng.uniform() < s;
    rs.push_back(scored(id, right ? "t" + std::to_string(i) : "x", s));
    ann.places[id] = gazetteered("t" + std::to_string(i));
  }
  const auto curve = precision_by_similarity(rs, ann);
  std::size_t k = 0;
  for (int step = 0; step <= 10; ++step) {
    const double s = step / 10.0;
    std::size_t total = 0, hits = 0;
    for (const auto& r : rs) {
      if (*r.score >= s) {
        ++total;
        if (*r.entry_id == *ann.places[r.place_id].truth_entry) ++hits;
      }
    }
    if (total == 0) continue;
    REQUIRE(k < curve.size());
    CHECK(curve[k].similarity == doctest::Approx(s));
    CHECK(curve[k].precision.total == total);
    CHECK(curve[k].precision.hits == hits);
    ++k;
  }
  CHECK(k == curve.size());
  CHECK(curve.back().similarity < 1.0);  // nothing scored 1.0: point omitted
}

TEST_CASE("recall trade-off edges") {
  std::vector<GeoreferenceResult> rs = {scored("g1", "a", 0.9), scored("g2", "b", 0.4), scored("n1", "c", 0.6),
                                        scored("n2", "d", 1.0)};
  AnnotationSet ann;
  ann.places["g1"] = gazetteered("a");
  ann.places["g2"] = gazetteered("b");
  ann.places["n1"] = non_gazetteered({1, 1});
  ann.places["n2"] = non_gazetteered({1, 1});
  const auto t = recall_tradeoff(rs, ann, {0.0, 0.5, 1.0 + 1e-9});
  REQUIRE(t.size() == 3);
  CHECK(*t[0].gazetteered.value() == 1.0);
  CHECK(*t[1].gazetteered.value() == 0.5);
  CHECK(*t[1].non_gazetteered.value() == 0.0);
  CHECK(*t[2].non_gazetteered.value() == 1.0);
  CHECK(*t[2].gazetteered.value() == 0.0);
}

TEST_CASE("threshold range") {
  const auto r = threshold_range(0.0, 1.0, 0.1);
  REQUIRE(r.size() == 11);
  CHECK(r[7] == 0.7);
  CHECK(r.back() == 1.0);
  CHECK_THROWS_AS(threshold_range(0.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(threshold_range(1.0, 0.0, 0.1), ValidationError);
}

TEST_CASE("annotations") {
  const auto a = load_annotations(R"({"places": [{"id": "x", "label": "anchor", "truth_entry": "e"},
                                                  {"id": "y", "label": "non-gazetteered", "truth_point": [1, 2]}]})");
  CHECK(a.places.size() == 2);
  CHECK(a.places.at("y").truth_point->y() == 2.0);
  CHECK_THROWS_AS(load_annotations(R"({"places": [{"id": "x", "label": "gazetteered"}]})"), ValidationError);
  CHECK_THROWS_AS(load_annotations(R"({"places": [{"id": "x", "label": "somewhere", "truth_entry": "e"}]})"),
                  ValidationError);
  CHECK(annotations_from_graph(testing::sample_graph()).places.size() == 6);
}

TEST_CASE("coverage check names the offenders") {
  AnnotationSet ann;
  ann.places["a"] = gazetteered("e");
  std::vector<GeoreferenceResult> rs = {scored("a", "e", 1.0), scored("b", "e", 1.0)};
  try {
    check_coverage(rs, ann);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("not annotated [b]") != std::string::npos);
  }
  rs.pop_back();
  CHECK_NOTHROW(check_coverage(rs, ann));
}
