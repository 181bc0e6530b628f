#pragma once

// Ball tree over geographic points under the haversine metric.
//
// Construction splits each node by the farthest-point-pair heuristic: take the
// first point of the node, find the point A farthest from it, then the point B
// farthest from A, and send every point to whichever of A and B is closer.
// Each ball is centered at the lat/lon mean of its points; the radius is the
// largest haversine distance from that center, so the bound holds in the true
// metric and pruning with `d(q, center) - radius > best` is exact.
//
// A built tree is immutable. Queries may run concurrently from any thread.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pedmap/geodesy.hpp"

namespace pedmap {

inline constexpr std::size_t kDefaultLeafSize = 16;

struct NeighborResult {
  std::size_t index = 0;  ///< position in the point list the tree was built from
  double distance = 0.0;  ///< meters

  friend bool operator==(const NeighborResult&, const NeighborResult&) = default;
};

/// Counters filled in by queries when requested.
struct QueryStats {
  std::size_t distance_evals = 0;
};

class BallTree {
 public:
  struct Node {
    GeoPoint center;
    double radius = 0.0;
    std::uint32_t begin = 0;  ///< range into the permuted index array
    std::uint32_t end = 0;
    std::int32_t left = -1;   ///< -1 for leaves
    std::int32_t right = -1;

    bool is_leaf() const noexcept { return left < 0; }
  };

  BallTree() = default;
  explicit BallTree(std::vector<GeoPoint> points, std::size_t leaf_size = kDefaultLeafSize);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t leaf_size() const noexcept { return leaf_size_; }

  const std::vector<GeoPoint>& points() const noexcept { return points_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  /// Point indices, grouped so every node owns the contiguous slice [begin, end).
  const std::vector<std::uint32_t>& order() const noexcept { return order_; }

  /// Closest point, ties broken by the lowest index. Empty tree gives nullopt.
  std::optional<NeighborResult> nearest(const GeoPoint& query, QueryStats* stats = nullptr) const;

  /// Every point within `radius_m` (inclusive), sorted by distance then index.
  std::vector<NeighborResult> within_radius(const GeoPoint& query, double radius_m,
                                            QueryStats* stats = nullptr) const;

 private:
  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void nearest_in(std::int32_t node, double node_dist, const GeoPoint& query,
                  std::optional<NeighborResult>& best, QueryStats* stats) const;

  std::vector<GeoPoint> points_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  std::size_t leaf_size_ = kDefaultLeafSize;
};

/// Builds a tree; throws Error when leaf_size is zero.
BallTree build_index(std::span<const GeoPoint> points, std::size_t leaf_size = kDefaultLeafSize);

/// Serial linear scan. Reference semantics for BallTree::nearest.
std::optional<NeighborResult> nearest_brute_force(std::span<const GeoPoint> points,
                                                  const GeoPoint& query);

/// Serial linear scan. Reference semantics for BallTree::within_radius.
std::vector<NeighborResult> within_radius_brute_force(std::span<const GeoPoint> points,
                                                      const GeoPoint& query, double radius_m);

// Batch kernels. Each query is independent, so the loop over queries runs
// under OpenMP; results are identical to calling the serial routine per query.

std::vector<std::optional<NeighborResult>> nearest_batch(const BallTree& tree,
                                                         std::span<const GeoPoint> queries);

std::vector<std::optional<NeighborResult>> nearest_brute_force_batch(
    std::span<const GeoPoint> points, std::span<const GeoPoint> queries);

/// Linear scan parallelized over the points (min-reduction), for one query.
std::optional<NeighborResult> nearest_brute_force_parallel(std::span<const GeoPoint> points,
                                                           const GeoPoint& query);

}  // namespace pedmap
