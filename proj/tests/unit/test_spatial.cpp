#include <doctest.h>

#include <numbers>

#include "georef/errors.hpp"
#include "georef/spatial.hpp"
#include "../support.hpp"

using namespace georef;

namespace {

Footprint square(double x0, double y0, double side) {
  const std::vector<Point> ring = {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}};
  return Footprint::polygon(ring);
}

Relatum at(const std::string& id, Footprint f, SpatialContext ctx = {}) {
  return Relatum{id, std::move(f), ctx, std::nullopt, std::nullopt};
}

const Box kWindow(Point(-1000, -1000), Point(1000, 1000));

}  // namespace

TEST_CASE("buffer distance") {
  NearBufferConfig cfg;
  CHECK(buffer_distance(Footprint::point({0, 0}), SpatialContext{}, cfg) == doctest::Approx(100.0));
  const SpatialContext ctx{Box(Point(0, 0), Point(1000, 1000))};
  CHECK(buffer_distance(square(0, 0, 100), ctx, cfg) == doctest::Approx(160.0));
  NearBufferConfig flat{100.0, 0.0, 0.0};
  CHECK(buffer_distance(square(0, 0, 100), ctx, flat) == doctest::Approx(100.0));
  CHECK_THROWS_AS((NearBufferConfig{0.0, 0.0, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((NearBufferConfig{10.0, -1.0, 0.0}.validate()), ValidationError);
}

TEST_CASE("north_of is the upper half of the window") {
  const auto s = search_space(RelationKind::north_of, at("r", Footprint::point({0, 0})), kWindow, {});
  CHECK(s.constraining);
  CHECK(s.region.area() == doctest::Approx(2000.0 * 1000.0));
  CHECK(s.region.contains({0, 1}));
  CHECK(s.region.contains({500, 0}));  // closed
  CHECK_FALSE(s.region.contains({0, -1}));
  const auto se = search_space(RelationKind::south_east_of, at("r", Footprint::point({0, 0})), kWindow, {});
  CHECK(se.region.area() == doctest::Approx(1000.0 * 1000.0));
  CHECK(se.region.contains({10, -10}));
  CHECK_FALSE(se.region.contains({-10, -10}));
}

TEST_CASE("inside gives the relatum polygon") {
  const auto p = square(10, 10, 50);
  const auto s = search_space(RelationKind::inside, at("r", p), kWindow, {});
  CHECK(s.constraining);
  CHECK(s.region.area() == doctest::Approx(2500.0));
  CHECK(s.region.covers(p));
  CHECK_THROWS_AS(search_space(RelationKind::inside, at("r", Footprint::point({0, 0})), kWindow, {}), NoSearchSpace);
  const auto o = search_space(RelationKind::overlap, at("r", p), kWindow, {});
  CHECK_FALSE(o.constraining);
}

TEST_CASE("near disc area") {
  SpatialConfig cfg;
  cfg.near = {160.0, 0.0, 0.0};
  const auto s = search_space(RelationKind::near, at("r", Footprint::point({0, 0})), kWindow, cfg);
  const double disc = std::numbers::pi * 160.0 * 160.0;
  CHECK(std::abs(s.region.area() - disc) / disc < 0.01);
  CHECK(s.region.contains({159, 0}));
  CHECK_FALSE(s.region.contains({161, 0}));
}

TEST_CASE("relative direction: frontal half of the near disc when the frame is known") {
  SpatialConfig cfg;
  cfg.near = {100.0, 0.0, 0.0};
  Relatum r = at("r", Footprint::point({0, 0}));
  const auto plain = search_space(RelationKind::in_front_of, r, kWindow, cfg);
  const auto near = search_space(RelationKind::near, r, kWindow, cfg);
  CHECK(plain.region.area() == doctest::Approx(near.region.area()));
  r.front_bearing_deg = 90.0;  // facing east
  const auto front = search_space(RelationKind::in_front_of, r, kWindow, cfg);
  CHECK(front.region.area() == doctest::Approx(near.region.area() / 2).epsilon(0.01));
  CHECK(front.region.contains({50, 0}));
  CHECK_FALSE(front.region.contains({-50, 0}));
}

TEST_CASE("single space is its own alr") {
  SpatialConfig cfg;
  const auto s = search_space(RelationKind::near, at("r", Footprint::point({0, 0})), kWindow, cfg);
  const std::vector<SearchSpace> one = {s};
  const auto alr = derive_alr(one, kWindow);
  CHECK(alr.region.area() == doctest::Approx(s.region.area()));
  CHECK_FALSE(alr.low_confidence);
  CHECK_THROWS_AS(derive_alr(std::span<const SearchSpace>{}, kWindow), Error);
}

TEST_CASE("disjoint near discs relax to a non-empty region") {
  SpatialConfig cfg;
  cfg.near = {100.0, 0.0, 0.0};
  const std::vector<SearchSpace> spaces = {
      search_space(RelationKind::near, at("p", Footprint::point({-500, 0})), kWindow, cfg),
      search_space(RelationKind::near, at("q", Footprint::point({500, 0})), kWindow, cfg)};
  const auto alr = derive_alr(spaces, kWindow);
  CHECK(alr.region.area() > 0.0);
  REQUIRE(alr.dropped.size() == 1);
  CHECK(alr.dropped[0] == 1);  // latest first among equals
  CHECK(alr.region.contains({-500, 0}));
}

TEST_CASE("only non-constraining spaces give the window") {
  const std::vector<SearchSpace> spaces = {search_space(RelationKind::disjoint, at("r", square(0, 0, 10)), kWindow, {})};
  const auto alr = derive_alr(spaces, kWindow);
  CHECK(alr.low_confidence);
  CHECK(alr.region.area() == doctest::Approx(2000.0 * 2000.0));
}

TEST_CASE("alr monotonicity") {
  testing::Rng rng(11);
  SpatialConfig cfg;
  static constexpr RelationKind kinds[] = {RelationKind::north_of, RelationKind::south_of, RelationKind::east_of,
                                           RelationKind::west_of, RelationKind::near};
  for (int round = 0; round < 40; ++round) {
    std::vector<SearchSpace> spaces;
    double previous = INFINITY;
    for (int k = 0; k < 4; ++k) {
      const Point c(rng.uniform(-60, 60), rng.uniform(-60, 60));
      spaces.push_back(search_space(kinds[rng.below(5)], at("r" + std::to_string(k), Footprint::point(c)), kWindow, cfg));
      const auto alr = derive_alr(spaces, kWindow);
      if (!alr.dropped.empty()) break;
      CHECK(alr.region.area() <= previous + 1e-6);
      for (const auto& s : spaces) CHECK(intersection(alr.region, s.region).area() == doctest::Approx(alr.region.area()).epsilon(1e-4));
      previous = alr.region.area();
    }
  }
}

TEST_CASE("orientation similarity") {
  CHECK(orientation_similarity(RelationKind::north_of, {0, 10}, {0, 0}) == doctest::Approx(1.0));
  CHECK(orientation_similarity(RelationKind::north_of, {10, 0}, {0, 0}) == doctest::Approx(0.0));
  CHECK(orientation_similarity(RelationKind::north_of, {10, 10}, {0, 0}) == doctest::Approx(0.5));
  CHECK(orientation_similarity(RelationKind::north_of, {0, -10}, {0, 0}) == doctest::Approx(0.0));
  CHECK(orientation_similarity(RelationKind::north_east_of, {10, 10}, {0, 0}) == doctest::Approx(1.0));
  CHECK(orientation_similarity(RelationKind::north_east_of, {0, 10}, {0, 0}) == doctest::Approx(0.0));
  CHECK(orientation_similarity(RelationKind::north_of, {3, 3}, {3, 3}) == 1.0);

  testing::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point p(rng.uniform(-100, 100), rng.uniform(-100, 100));
    const Point r(rng.uniform(-100, 100), rng.uniform(-100, 100));
    const double ry = r.y();
    const Point pm(p.x(), 2 * ry - p.y());
    CHECK(orientation_similarity(RelationKind::north_of, p, r) ==
          doctest::Approx(orientation_similarity(RelationKind::south_of, pm, r)));
  }
}

TEST_CASE("nearness similarity") {
  const auto r = Footprint::point({0, 0});
  CHECK(nearness_similarity({0, 0}, r, 100) == doctest::Approx(1.0));
  CHECK(nearness_similarity({100, 0}, r, 100) == doctest::Approx(0.0));
  CHECK(nearness_similarity({0, 50}, r, 100) == doctest::Approx(0.5));
  CHECK(nearness_similarity({0, 500}, r, 100) == 0.0);
}

TEST_CASE("topological relations") {
  const auto big = square(0, 0, 100);
  const auto small = square(10, 10, 20);
  CHECK(topological_similarity(RelationKind::equal, big, big) == 1.0);
  CHECK(topological_similarity(RelationKind::inside, small, big) == 1.0);
  CHECK(topological_similarity(RelationKind::inside, big, small) == 0.0);
  CHECK(topological_relation(big, small) == RelationKind::contain);
  CHECK(topological_relation(square(0, 0, 50), big) == RelationKind::covered_by);
  const auto left = square(0, 0, 10);
  CHECK(topological_similarity(RelationKind::meet, left, square(10, 0, 10)) == 1.0);
  CHECK(topological_similarity(RelationKind::meet, left, square(11, 0, 10)) == 0.0);
  CHECK(topological_relation(left, square(11, 0, 10)) == RelationKind::disjoint);
  CHECK(topological_relation(left, square(5, 5, 10)) == RelationKind::overlap);
  CHECK_FALSE(topological_similarity(RelationKind::inside, Footprint::point({1, 1}), big).has_value());
}

TEST_CASE("spatial similarity") {
  SpatialConfig cfg;
  cfg.near = {100.0, 0.0, 0.0};
  const Relatum r = at("r", Footprint::point({0, 0}));

  std::vector<Constraint> one = {{RelationKind::near, r, "near"}};
  CHECK(spatial_similarity(Footprint::point({0, 0}), one, cfg).value == doctest::Approx(1.0));

  // near 0.6 at distance 40; the bearing of 18 degrees off north gives 0.8
  const double t = 18.0 * std::numbers::pi / 180.0;
  const Point p(40 * std::sin(t), 40 * std::cos(t));
  std::vector<Constraint> two = {{RelationKind::near, r, "near"}, {RelationKind::north_of, r, "north of"}};
  const auto s = spatial_similarity(Footprint::point(p), two, cfg);
  CHECK(s.value == doctest::Approx(0.7));
  CHECK(s.used == 2);

  const Relatum poly = at("p", square(0, 0, 100));
  std::vector<Constraint> failed = {{RelationKind::inside, poly, "in"}, {RelationKind::near, poly, "near"}};
  const auto f = spatial_similarity(square(200, 200, 10), failed, cfg);
  CHECK(f.value == 0.0);
  CHECK(f.filtered);

  std::vector<Constraint> skipped = {{RelationKind::inside, poly, "in"}};
  const auto n = spatial_similarity(Footprint::point({5, 5}), skipped, cfg);
  CHECK(n.neutral);
  CHECK(n.value == 0.5);
}
