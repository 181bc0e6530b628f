#include "pedmap/spatial_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pedmap {

namespace {

// Absolute slack on pruning bounds so that last-ulp rounding in the
// triangle inequality can never discard a true neighbor.
constexpr double kPruneSlackM = 1e-6;

bool better(const NeighborResult& a, const NeighborResult& b) noexcept {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

void offer(std::optional<NeighborResult>& best, const NeighborResult& candidate) noexcept {
  if (!best || better(candidate, *best)) best = candidate;
}

double dist_counted(const GeoPoint& a, const GeoPoint& b, QueryStats* stats) noexcept {
  if (stats) ++stats->distance_evals;
  return haversine_distance(a, b);
}

}  // namespace

BallTree::BallTree(std::vector<GeoPoint> points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(leaf_size) {
  if (leaf_size_ == 0) throw Error("ball tree leaf_size must be positive");
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("ball tree supports at most 2^32-1 points");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * (points_.size() / leaf_size_ + 1));
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t BallTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();

  double lat_sum = 0.0;
  double lon_sum = 0.0;
  for (std::uint32_t i = begin; i < end; ++i) {
    lat_sum += points_[order_[i]].lat();
    lon_sum += points_[order_[i]].lon();
  }
  const double n = static_cast<double>(end - begin);
  const GeoPoint center(std::clamp(lat_sum / n, -90.0, 90.0), lon_sum / n);
  double radius = 0.0;
  for (std::uint32_t i = begin; i < end; ++i) {
    radius = std::max(radius, haversine_distance(center, points_[order_[i]]));
  }
  nodes_[id].center = center;
  nodes_[id].radius = radius;
  nodes_[id].begin = begin;
  nodes_[id].end = end;

  if (end - begin <= leaf_size_ || radius == 0.0) return id;

  auto farthest_from = [&](const GeoPoint& from) {
    std::uint32_t arg = begin;
    double far = -1.0;
    for (std::uint32_t i = begin; i < end; ++i) {
      const double d = haversine_distance(from, points_[order_[i]]);
      if (d > far) {
        far = d;
        arg = i;
      }
    }
    return points_[order_[arg]];
  };
  const GeoPoint pivot_a = farthest_from(points_[order_[begin]]);
  const GeoPoint pivot_b = farthest_from(pivot_a);

  auto first = order_.begin() + begin;
  auto last = order_.begin() + end;
  auto mid = std::stable_partition(first, last, [&](std::uint32_t idx) {
    return haversine_distance(points_[idx], pivot_a) <= haversine_distance(points_[idx], pivot_b);
  });
  if (mid == first || mid == last) mid = first + (last - first) / 2;
  const auto split = static_cast<std::uint32_t>(mid - order_.begin());

  const std::int32_t left = build(begin, split);
  const std::int32_t right = build(split, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void BallTree::nearest_in(std::int32_t node_id, double node_dist, const GeoPoint& query,
                          std::optional<NeighborResult>& best, QueryStats* stats) const {
  const Node& node = nodes_[node_id];
  if (best && node_dist - node.radius > best->distance + kPruneSlackM) return;

  if (node.is_leaf()) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      offer(best, {idx, dist_counted(query, points_[idx], stats)});
    }
    return;
  }

  const double dl = dist_counted(query, nodes_[node.left].center, stats);
  const double dr = dist_counted(query, nodes_[node.right].center, stats);
  if (dl <= dr) {
    nearest_in(node.left, dl, query, best, stats);
    nearest_in(node.right, dr, query, best, stats);
  } else {
    nearest_in(node.right, dr, query, best, stats);
    nearest_in(node.left, dl, query, best, stats);
  }
}

std::optional<NeighborResult> BallTree::nearest(const GeoPoint& query, QueryStats* stats) const {
  std::optional<NeighborResult> best;
  if (nodes_.empty()) return best;
  nearest_in(0, dist_counted(query, nodes_[0].center, stats), query, best, stats);
  return best;
}

std::vector<NeighborResult> BallTree::within_radius(const GeoPoint& query, double radius_m,
                                                    QueryStats* stats) const {
  if (!(radius_m >= 0.0)) throw Error("query radius must be non-negative");
  std::vector<NeighborResult> out;
  if (nodes_.empty()) return out;

  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (dist_counted(query, node.center, stats) - node.radius > radius_m + kPruneSlackM) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t idx = order_[i];
        const double d = dist_counted(query, points_[idx], stats);
        if (d <= radius_m) out.push_back({idx, d});
      }
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  std::sort(out.begin(), out.end(), better);
  return out;
}

BallTree build_index(std::span<const GeoPoint> points, std::size_t leaf_size) {
  return BallTree(std::vector<GeoPoint>(points.begin(), points.end()), leaf_size);
}

std::optional<NeighborResult> nearest_brute_force(std::span<const GeoPoint> points,
                                                  const GeoPoint& query) {
  std::optional<NeighborResult> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    offer(best, {i, haversine_distance(query, points[i])});
  }
  return best;
}

std::vector<NeighborResult> within_radius_brute_force(std::span<const GeoPoint> points,
                                                      const GeoPoint& query, double radius_m) {
  std::vector<NeighborResult> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = haversine_distance(query, points[i]);
    if (d <= radius_m) out.push_back({i, d});
  }
  std::sort(out.begin(), out.end(), better);
  return out;
}

std::vector<std::optional<NeighborResult>> nearest_batch(const BallTree& tree,
                                                         std::span<const GeoPoint> queries) {
  std::vector<std::optional<NeighborResult>> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = tree.nearest(queries[i]);
  }
  return out;
}

std::vector<std::optional<NeighborResult>> nearest_brute_force_batch(
    std::span<const GeoPoint> points, std::span<const GeoPoint> queries) {
  std::vector<std::optional<NeighborResult>> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = nearest_brute_force(points, queries[i]);
  }
  return out;
}

std::optional<NeighborResult> nearest_brute_force_parallel(std::span<const GeoPoint> points,
                                                           const GeoPoint& query) {
  std::optional<NeighborResult> best;
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel
  {
    std::optional<NeighborResult> local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      offer(local, {static_cast<std::size_t>(i), haversine_distance(query, points[i])});
    }
    if (local) {
#pragma omp critical(pedmap_nearest_reduce)
      offer(best, *local);
    }
  }
  return best;
}

}  // namespace pedmap
