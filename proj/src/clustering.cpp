#include "georef/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>

#include "georef/errors.hpp"

namespace georef {

namespace {

// Index j >= 1 of the interval (j*dd - dd, j*dd] holding r > 0.
std::size_t interval_of(double r, double dd) {
  auto j = static_cast<std::size_t>(std::max(1.0, std::ceil(r / dd)));
  while (static_cast<double>(j) * dd < r) ++j;
  while (j > 1 && static_cast<double>(j) * dd - dd >= r) --j;
  return j;
}

}  // namespace

KFunctionProfile k_function(const Eigen::Ref<const Eigen::Matrix2Xd>& points, double delta_d, unsigned jobs) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (n < 2) throw Error("K function needs at least two points");
  if (!(delta_d > 0.0)) throw Error("K function interval must be positive");

  KFunctionProfile profile;
  profile.delta_d = delta_d;
  profile.n = n;

  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) max_sq = std::max(max_sq, (points.col(i) - points.col(k)).squaredNorm());
  }
  profile.max_distance = std::sqrt(max_sq);
  const std::size_t bins = profile.max_distance > 0.0 ? interval_of(profile.max_distance, delta_d) : 1;

  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(n));
  std::vector<std::vector<std::uint64_t>> partial(jobs, std::vector<std::uint64_t>(bins, 0));
  const auto work = [&](unsigned t) {
    auto& counts = partial[t];
    for (std::size_t i = t; i < n; i += jobs) {
      for (std::size_t k = i + 1; k < n; ++k) {
        const double r = (points.col(i) - points.col(k)).norm();
        if (r <= 0.0) continue;
        const std::size_t j = interval_of(r, delta_d);
        if (j <= bins) counts[j - 1] += 2;  // each point of the pair sees the other
      }
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t);
  }

  profile.counts.assign(bins, 0);
  for (const auto& part : partial) {
    for (std::size_t j = 0; j < bins; ++j) profile.counts[j] += part[j];
  }
  profile.distances.resize(bins);
  profile.values.resize(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    const double d = static_cast<double>(j + 1) * delta_d;
    const double inner = d - delta_d;
    const double ring = std::numbers::pi * d * d - std::numbers::pi * inner * inner;
    profile.distances[j] = d;
    profile.values[j] = static_cast<double>(profile.counts[j]) / (ring * static_cast<double>(n));
  }
  return profile;
}

ClusterDistance cluster_distance(const KFunctionProfile& profile) {
  if (profile.values.empty()) throw NoClusterSignal("empty K function profile");
  const auto m = static_cast<double>(profile.values.size());
  const double mean = std::accumulate(profile.values.begin(), profile.values.end(), 0.0) / m;
  double var = 0.0;
  for (double k : profile.values) var += (k - mean) * (k - mean);
  const double sigma = std::sqrt(var / m);

  ClusterDistance out;
  const auto lo = std::min_element(profile.values.begin(), profile.values.end());
  const auto hi = std::max_element(profile.values.begin(), profile.values.end());
  // A flat profile has sigma exactly 0; summation rounding must not push the threshold above it.
  out.zero_variance = *lo == *hi;
  out.threshold = out.zero_variance ? *hi : mean + 3.0 * sigma;
  const auto argmax = static_cast<std::size_t>(std::distance(profile.values.begin(), hi));
  out.argmax_distance = profile.distances[argmax];
  for (std::size_t j = argmax; j < profile.values.size(); ++j) {
    if (profile.values[j] >= out.threshold) {
      out.distance = profile.distances[j];
      return out;
    }
  }
  throw NoClusterSignal("no K(d) reaches mean + 3 sigma at or beyond the argmax distance");
}

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

const std::string& smallest_entry(const Cluster& c, std::span<const ClusterPoint> points) {
  const std::string* best = &points[c.members.front()].entry_id;
  for (auto i : c.members) {
    if (points[i].entry_id < *best) best = &points[i].entry_id;
  }
  return *best;
}

void rank_clusters(std::vector<Cluster>& clusters, std::span<const ClusterPoint> points) {
  std::sort(clusters.begin(), clusters.end(), [&](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    if (a.context.area() != b.context.area()) return a.context.area() < b.context.area();
    return smallest_entry(a, points) < smallest_entry(b, points);
  });
  for (std::size_t r = 0; r < clusters.size(); ++r) clusters[r].rank = r + 1;
}

Cluster make_cluster(std::vector<std::size_t> members, std::span<const ClusterPoint> points) {
  Cluster c;
  c.members = std::move(members);
  for (auto i : c.members) c.context.box.extend(points[i].position);
  return c;
}

}  // namespace

std::vector<Cluster> compute_clusters(std::span<const ClusterPoint> points, double cluster_distance) {
  if (!(cluster_distance > 0.0)) throw Error("cluster distance must be positive");
  DisjointSet sets(points.size());
  const double limit = cluster_distance * cluster_distance;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = i + 1; k < points.size(); ++k) {
      if ((points[i].position - points[k].position).squaredNorm() <= limit) sets.join(i, k);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < points.size(); ++i) groups[sets.find(i)].push_back(i);
  std::vector<Cluster> clusters;
  for (auto& [root, members] : groups) {
    if (members.size() >= 2) clusters.push_back(make_cluster(std::move(members), points));
  }
  rank_clusters(clusters, points);
  return clusters;
}

Disambiguation disambiguate_anchors(const AnchorCandidates& candidates, double delta_d, unsigned jobs) {
  if (candidates.empty()) throw Error("no anchor candidates to disambiguate");
  Disambiguation out;
  for (const auto& [place, entries] : candidates) {
    for (const auto* e : entries) out.points.push_back({e->footprint.centroid(), place, e->id});
  }

  if (out.points.size() < 2) {
    for (const auto& [place, entries] : candidates) {
      AnchorAssignment a;
      if (!entries.empty()) {
        a.status = AnchorStatus::assigned;
        a.entry_id = entries.front()->id;
        a.context.box.extend(entries.front()->footprint.centroid());
      }
      out.assignments.emplace(place, std::move(a));
    }
    return out;
  }

  Eigen::Matrix2Xd cloud(2, static_cast<Eigen::Index>(out.points.size()));
  for (std::size_t i = 0; i < out.points.size(); ++i) cloud.col(static_cast<Eigen::Index>(i)) = out.points[i].position;
  out.profile = k_function(cloud, delta_d, jobs);

  try {
    out.rule = cluster_distance(*out.profile);
    out.single_cluster_fallback = out.rule->zero_variance;
  } catch (const NoClusterSignal&) {
    out.single_cluster_fallback = true;
  }

  if (out.single_cluster_fallback) {
    out.cluster_distance_used = out.profile->max_distance;
    std::vector<std::size_t> all(out.points.size());
    std::iota(all.begin(), all.end(), 0);
    out.clusters.push_back(make_cluster(std::move(all), out.points));
    out.clusters.front().rank = 1;
  } else {
    out.cluster_distance_used = out.rule->distance;
    out.clusters = compute_clusters(out.points, out.cluster_distance_used);
  }

  for (const auto& [place, entries] : candidates) out.assignments.emplace(place, AnchorAssignment{});
  std::set<std::string> settled;
  for (const auto& cluster : out.clusters) {
    std::map<std::string, std::set<std::string>> found;  // place -> entries inside this cluster
    for (auto i : cluster.members) {
      const auto& p = out.points[i];
      if (!settled.contains(p.place_id)) found[p.place_id].insert(p.entry_id);
    }
    for (auto& [place, entries] : found) {
      auto& a = out.assignments[place];
      a.cluster_rank = cluster.rank;
      a.context = cluster.context;
      if (entries.size() == 1) {
        a.status = AnchorStatus::assigned;
        a.entry_id = *entries.begin();
      } else {
        a.status = AnchorStatus::ambiguous;
        a.ambiguous_entries.assign(entries.begin(), entries.end());
      }
      settled.insert(place);
    }
  }
  return out;
}

}  // namespace georef
