#pragma once

// Independent reference implementations and deterministic fixture generators for the tests.
// Nothing here calls the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "georef/gazetteer.hpp"
#include "georef/graph.hpp"

namespace testing {

using georef::Point;

inline std::string data_path(const std::string& name) { return std::string(GEOREF_TEST_DATA) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline georef::Gazetteer sample_gazetteer() { return georef::load_gazetteer(slurp(data_path("sample_gazetteer.geojson"))); }
inline georef::PlaceGraph sample_graph() { return georef::load_place_graph(slurp(data_path("sample_graph.json"))).graph; }

// Box-Muller on a 64-bit Mersenne Twister; the standard distributions are not portable across libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------------------------
// K function by sorted distance list and binary search over every interval.

struct BruteK {
  std::vector<std::uint64_t> counts;
  std::vector<double> values;
};

inline BruteK brute_k(const std::vector<Point>& pts, double dd) {
  std::vector<double> dist;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const double r = std::hypot(pts[i].x() - pts[j].x(), pts[i].y() - pts[j].y());
      if (r > 0.0) dist.push_back(r);
    }
  }
  std::sort(dist.begin(), dist.end());
  const double max = dist.empty() ? 0.0 : dist.back();
  std::size_t bins = 1;
  while (static_cast<double>(bins) * dd < max) ++bins;
  BruteK out;
  const auto n = static_cast<double>(pts.size());
  for (std::size_t j = 1; j <= bins; ++j) {
    const double hi = static_cast<double>(j) * dd;
    const double lo = hi - dd;
    // Interval (lo, hi].
    const auto first = std::upper_bound(dist.begin(), dist.end(), lo);
    const auto last = std::upper_bound(dist.begin(), dist.end(), hi);
    const auto c = static_cast<std::uint64_t>(last - first);
    out.counts.push_back(c);
    const double ring = std::numbers::pi * (hi * hi - lo * lo);
    out.values.push_back(static_cast<double>(c) / (ring * n));
  }
  return out;
}

// Smallest d with K(d) >= mean + 3 sigma and d >= argmax, by checking every interval.
inline std::optional<double> rule_scan(const std::vector<double>& d, const std::vector<double>& k) {
  long double mean = 0.0L;
  for (double v : k) mean += v;
  mean /= static_cast<long double>(k.size());
  long double var = 0.0L;
  for (double v : k) var += (v - mean) * (v - mean);
  var /= static_cast<long double>(k.size());
  const double threshold = static_cast<double>(mean + 3.0L * std::sqrt(var));
  std::size_t arg = 0;
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (k[i] > k[arg]) arg = i;
  }
  std::optional<double> best;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] >= threshold && d[i] >= d[arg] && (!best || d[i] < *best)) best = d[i];
  }
  return best;
}

// ---------------------------------------------------------------------------------------------
// Planar predicates for the raster oracle.

struct Rect {
  double x0, y0, x1, y1;
};

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 == 0.0 ? 0.0 : (p - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline bool ray_cast_inside(const Point& p, const std::vector<Point>& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

inline double ring_boundary_distance(const Point& p, const std::vector<Point>& ring) {
  double best = INFINITY;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    best = std::min(best, point_segment_distance(p, ring[j], ring[i]));
  }
  return best;
}

/// Distance from p to a closed polygon (0 inside).
inline double polygon_distance(const Point& p, const std::vector<Point>& ring) {
  return ray_cast_inside(p, ring) ? 0.0 : ring_boundary_distance(p, ring);
}

inline std::vector<Point> rect_ring(const Rect& r) {
  return {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
}

inline double shoelace(const std::vector<Point>& ring) {
  double a = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    a += ring[j].x() * ring[i].y() - ring[i].x() * ring[j].y();
  }
  return std::abs(a) / 2.0;
}

inline Point ring_centroid(const std::vector<Point>& ring) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const double w = ring[j].x() * ring[i].y() - ring[i].x() * ring[j].y();
    a += w;
    cx += (ring[j].x() + ring[i].x()) * w;
    cy += (ring[j].y() + ring[i].y()) * w;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

// ---------------------------------------------------------------------------------------------
// Fixture builders.

inline nlohmann::json point_feature(const std::string& id, const std::string& name, const Point& p,
                                    nlohmann::json tags = nlohmann::json::object()) {
  return {{"type", "Feature"},
          {"properties", {{"id", id}, {"name", name}, {"tags", tags}}},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.x(), p.y()}}}}};
}

inline nlohmann::json rect_feature(const std::string& id, const std::string& name, const Rect& r,
                                   nlohmann::json tags = nlohmann::json::object()) {
  nlohmann::json ring = nlohmann::json::array();
  for (const auto& p : rect_ring(r)) ring.push_back({p.x(), p.y()});
  ring.push_back({r.x0, r.y0});
  return {{"type", "Feature"},
          {"properties", {{"id", id}, {"name", name}, {"tags", tags}}},
          {"geometry", {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}}}};
}

inline georef::Gazetteer planar_gazetteer(const nlohmann::json& features) {
  nlohmann::json doc = {{"type", "FeatureCollection"}, {"projected", true}, {"features", features}};
  return georef::load_gazetteer(doc.dump());
}

/// Two dense foci of true entries 50 km apart, 20 anchors each, plus about 10% uniform noise
/// entries attached as homonyms to some anchors.
struct TwoFoci {
  std::vector<georef::GazetteerEntry> entries;
  std::map<std::string, std::vector<std::size_t>> anchors;  // anchor id -> entry indices
  std::map<std::string, std::string> truth;                 // anchor id -> entry id
};

inline TwoFoci two_foci(std::uint64_t seed) {
  Rng rng(seed);
  TwoFoci out;
  const Point foci[2] = {{0.0, 0.0}, {50000.0, 0.0}};
  constexpr double sigma = 60.0;
  for (int k = 0; k < 40; ++k) {
    const Point& f = foci[k / 20];
    const Point p(f.x() + sigma * rng.normal(), f.y() + sigma * rng.normal());
    const std::string anchor = "p" + std::to_string(k);
    const std::string id = "true-" + std::to_string(k);
    out.entries.push_back({id, "Place " + std::to_string(k), "", georef::Footprint::point(p), {}});
    out.anchors[anchor].push_back(out.entries.size() - 1);
    out.truth[anchor] = id;
  }
  for (int k = 0; k < 4; ++k) {
    const Point p(rng.uniform(-100000.0, 150000.0), rng.uniform(-100000.0, 100000.0));
    const std::string anchor = "p" + std::to_string(rng.below(40));
    out.entries.push_back({"noise-" + std::to_string(k), "Noise", "", georef::Footprint::point(p), {}});
    out.anchors[anchor].push_back(out.entries.size() - 1);
  }
  return out;
}

/// 60 places around three anchors: 30 whose single reference is a misspelt gazetteer name and
/// 30 described by generic phrases, each related to an anchor by a direction and nearness.
struct TradeoffFixture {
  nlohmann::json graph;
  nlohmann::json gazetteer;
};

inline TradeoffFixture tradeoff_fixture(std::uint64_t seed) {
  Rng rng(seed);
  static const std::vector<std::string> first = {"Harbour", "Balmoral", "Carlton", "Regent", "Victoria",
                                                 "Waverley", "Kingsley", "Ashford", "Bellevue", "Somerset"};
  static const std::vector<std::string> second = {"Gallery", "Theatre", "Library", "Chapel", "Arcade", "Pavilion"};
  static const std::vector<std::string> generic = {
      "the old oak tree",  "the meeting point", "the green bench",  "the water fountain", "the bus shelter",
      "the big rock",      "the picnic spot",   "the rose garden",  "the corner kiosk",   "the lookout",
      "the stone steps",   "the red door",      "the flag pole",    "the duck pond",      "the bike racks",
      "the sundial",       "the archway",       "the playground",   "the statue",         "the bandstand",
      "the clock tower",   "the side lane",     "the loading dock", "the ticket booth",   "the war memorial",
      "the little bridge", "the small gallery", "the car park",     "the taxi rank",      "the fish market"};

  const std::vector<std::pair<std::string, Point>> anchors = {
      {"Central Station", {0.0, 0.0}}, {"Town Hall", {420.0, 260.0}}, {"Museum of Art", {-380.0, 300.0}}};

  nlohmann::json features = nlohmann::json::array();
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& [name, p] = anchors[i];
    const std::string id = "anchor-" + std::to_string(i);
    features.push_back(point_feature(id, name, p));
    nodes.push_back({{"id", "A" + std::to_string(i)},
                     {"references", {name}},
                     {"annotation", {{"label", "anchor"}, {"truth_entry", id}}}});
  }

  const auto relate = [&](const std::string& place, std::size_t anchor, const Point& where) {
    const Point v = where - anchors[anchor].second;
    std::string dir;
    if (std::abs(v.x()) > std::abs(v.y())) {
      dir = v.x() > 0 ? "east of" : "west of";
    } else {
      dir = v.y() > 0 ? "north of" : "south of";
    }
    const std::string target = "A" + std::to_string(anchor);
    edges.push_back({{"locatum", place}, {"relation", dir}, {"relatum", target}});
    edges.push_back({{"locatum", place}, {"relation", "near"}, {"relatum", target}});
  };

  const auto misspell = [&](std::string word) {
    const std::size_t i = 1 + rng.below(word.size() - 2);
    switch (rng.below(3)) {
      case 0: word.erase(i, 1); break;
      case 1: std::swap(word[i], word[i + 1]); break;
      default: word[i] = word[i] == 'e' ? 'a' : 'e'; break;
    }
    return word;
  };

  const auto scatter = [&](std::size_t anchor) {
    const double r = rng.uniform(20.0, 95.0);
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return Point(anchors[anchor].second + Point(r * std::cos(t), r * std::sin(t)));
  };

  for (int k = 0; k < 30; ++k) {
    const std::string name = first[static_cast<std::size_t>(k) % first.size()] + " " +
                             second[static_cast<std::size_t>(k) / first.size() + 3 * (k % 2)];
    const std::size_t anchor = static_cast<std::size_t>(k) % anchors.size();
    const Point where = scatter(anchor);
    const std::string id = "entry-" + std::to_string(k);
    features.push_back(point_feature(id, name, where));

    // Misspell one word, sometimes both.
    const auto space = name.find(' ');
    std::string a = name.substr(0, space), b = name.substr(space + 1);
    const bool first_word = rng.below(2) == 0;
    (first_word ? a : b) = misspell(first_word ? a : b);
    if (rng.below(4) == 0) (first_word ? b : a) = misspell(first_word ? b : a);
    const std::string place = "G" + std::to_string(k);
    nodes.push_back({{"id", place},
                     {"references", {a + " " + b}},
                     {"annotation", {{"label", "gazetteered"}, {"truth_entry", id}}}});
    relate(place, anchor, where);
  }
  for (int k = 0; k < 30; ++k) {
    const std::size_t anchor = static_cast<std::size_t>(k + 1) % anchors.size();
    const Point where = scatter(anchor);
    const std::string place = "N" + std::to_string(k);
    nodes.push_back({{"id", place},
                     {"references", {generic[static_cast<std::size_t>(k)]}},
                     {"annotation", {{"label", "non-gazetteered"}, {"truth_point", {where.x(), where.y()}}}}});
    relate(place, anchor, where);
  }
  TradeoffFixture out;
  out.graph = {{"nodes", nodes}, {"edges", edges}};
  out.gazetteer = {{"type", "FeatureCollection"}, {"projected", true}, {"features", features}};
  return out;
}

}  // namespace testing
