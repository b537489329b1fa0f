#include <doctest.h>

#include "georef/errors.hpp"
#include "georef/gazetteer.hpp"
#include "../support.hpp"

using namespace georef;
using testing::Rect;

TEST_CASE("empty collection") {
  const auto g = load_gazetteer(R"({"type": "FeatureCollection", "features": []})");
  CHECK(g.size() == 0);
  CHECK(g.lookup_exact("anything").empty());
}

TEST_CASE("bbox query returns all three") {
  nlohmann::json f = nlohmann::json::array();
  f.push_back(testing::point_feature("p", "P", {10, 10}));
  f.push_back(testing::rect_feature("r", "R", {20, 20, 40, 40}));
  f.push_back(testing::point_feature("q", "Q", {-5, 30}));
  const auto g = testing::planar_gazetteer(f);
  CHECK(g.size() == 3);
  const auto hits = g.query_region(Region::from_box(Box(Point(-10, 0), Point(50, 50))));
  REQUIRE(hits.size() == 3);
  CHECK(hits[0]->id == "p");
  CHECK(hits[1]->id == "q");
  CHECK(hits[2]->id == "r");
}

TEST_CASE("bow-tie polygon is rejected") {
  nlohmann::json bow = {{"type", "Feature"},
                        {"properties", {{"id", "x"}, {"name", "X"}}},
                        {"geometry", {{"type", "Polygon"},
                                      {"coordinates", {{{0, 0}, {10, 10}, {10, 0}, {0, 10}, {0, 0}}}}}}};
  CHECK_THROWS_AS(testing::planar_gazetteer(nlohmann::json::array({bow})), GeometryError);
}

TEST_CASE("duplicate ids are rejected") {
  nlohmann::json f = nlohmann::json::array();
  f.push_back(testing::point_feature("p", "P", {0, 0}));
  f.push_back(testing::point_feature("p", "Q", {1, 1}));
  CHECK_THROWS_AS(testing::planar_gazetteer(f), ValidationError);
}

TEST_CASE("exact lookup on sample") {
  const auto g = testing::sample_gazetteer();
  REQUIRE(g.lookup_exact("Federation Square").size() == 1);
  CHECK(g.lookup_exact("Federation Square")[0]->id == "federation-square");
  CHECK(g.lookup_exact("the large square").empty());
  CHECK(g.lookup_exact("st paul's cathedral").size() == 3);
  CHECK(g.lookup_exact("  ST   PAUL\xE2\x80\x99S  Cathedral ").size() == 3);
  CHECK(g.lookup_exact("Federation Squar").empty());
}

TEST_CASE("region query agrees with a linear scan") {
  testing::Rng rng(7);
  for (int round = 0; round < 20; ++round) {
    nlohmann::json f = nlohmann::json::array();
    std::vector<Rect> rects;
    for (int i = 0; i < 60; ++i) {
      const double x = rng.uniform(-1000, 1000), y = rng.uniform(-1000, 1000);
      const double w = rng.uniform(1, 80), h = rng.uniform(1, 80);
      rects.push_back({x, y, x + w, y + h});
      f.push_back(testing::rect_feature("e" + std::to_string(1000 + i), "E", rects.back()));
    }
    const auto g = testing::planar_gazetteer(f);
    const double x = rng.uniform(-1000, 800), y = rng.uniform(-1000, 800);
    const Rect q{x, y, x + rng.uniform(10, 400), y + rng.uniform(10, 400)};
    std::vector<std::string> expect;
    for (std::size_t i = 0; i < rects.size(); ++i) {
      const auto& r = rects[i];
      if (r.x0 <= q.x1 && q.x0 <= r.x1 && r.y0 <= q.y1 && q.y0 <= r.y1) expect.push_back("e" + std::to_string(1000 + i));
    }
    std::vector<std::string> got;
    for (const auto* e : g.query_region(Region::from_box(Box(Point(q.x0, q.y0), Point(q.x1, q.y1))))) got.push_back(e->id);
    CHECK(got == expect);
  }
}

TEST_CASE("wgs84 input is projected to meters") {
  nlohmann::json f = nlohmann::json::array();
  f.push_back(testing::point_feature("a", "A", {144.9671, -37.8183}));
  f.push_back(testing::point_feature("b", "B", {144.9681, -37.8183}));
  const auto g = load_gazetteer(nlohmann::json{{"type", "FeatureCollection"}, {"features", f}}.dump());
  REQUIRE(g.projection());
  const double dx = (g.entry("b").footprint.centroid() - g.entry("a").footprint.centroid()).norm();
  // 0.001 deg of longitude at 37.8 S
  CHECK(dx == doctest::Approx(87.9).epsilon(0.01));
  const Point back = g.projection()->inverse(g.entry("a").footprint.centroid());
  CHECK(back.x() == doctest::Approx(144.9671));
  CHECK(back.y() == doctest::Approx(-37.8183));
}
