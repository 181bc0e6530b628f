#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "pedmap/spatial_index.hpp"

using namespace pedmap;

namespace {

std::vector<GeoPoint> random_points(std::mt19937_64& rng, std::size_t n, double lat0 = 32.8,
                                    double lon0 = -117.3, double span = 0.1) {
  std::uniform_real_distribution<double> u(0.0, span);
  std::vector<GeoPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(lat0 + u(rng), lon0 + u(rng));
  return pts;
}

// Walks every node and checks that its slice of points lies inside its ball
// and that the children partition the parent's slice.
void check_structure(const BallTree& tree) {
  const auto& nodes = tree.nodes();
  const auto& order = tree.order();
  std::vector<int> seen(tree.size(), 0);
  for (const auto& node : nodes) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const double d = haversine_distance(node.center, tree.points()[order[i]]);
      ASSERT_LE(d, node.radius + 1e-6);
    }
    if (node.is_leaf()) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) ++seen[order[i]];
    } else {
      const auto& l = nodes[node.left];
      const auto& r = nodes[node.right];
      ASSERT_EQ(l.begin, node.begin);
      ASSERT_EQ(l.end, r.begin);
      ASSERT_EQ(r.end, node.end);
    }
  }
  for (const int s : seen) ASSERT_EQ(s, 1);
}

}  // namespace

TEST(BallTree, EmptyTree) {
  const BallTree tree = build_index({});
  EXPECT_TRUE(tree.empty());
  EXPECT_FALSE(tree.nearest({0, 0}).has_value());
  EXPECT_TRUE(tree.within_radius({0, 0}, 1e9).empty());
  EXPECT_FALSE(nearest_brute_force({}, {0, 0}).has_value());
}

TEST(BallTree, ZeroLeafSizeThrows) {
  const std::vector<GeoPoint> pts{{0, 0}};
  EXPECT_THROW(build_index(pts, 0), Error);
}

TEST(BallTree, SinglePoint) {
  const std::vector<GeoPoint> pts{{32.88, -117.23}};
  const BallTree tree = build_index(pts);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_TRUE(tree.nodes()[0].is_leaf());
  const auto hit = tree.nearest({0, 0});
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->index, 0u);
  EXPECT_EQ(hit->distance, haversine_distance({0, 0}, pts[0]));
  const auto bf = nearest_brute_force(pts, {1, 1});
  ASSERT_TRUE(bf);
  EXPECT_EQ(bf->index, 0u);
}

TEST(BallTree, BallInvariantsOnRandomPoints) {
  std::mt19937_64 rng(1000);
  const auto pts = random_points(rng, 1000);
  const BallTree tree = build_index(pts, 16);
  check_structure(tree);
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) EXPECT_LE(node.end - node.begin, 16u);
  }
}

TEST(BallTree, DuplicatePointsTerminate) {
  std::vector<GeoPoint> pts(500, GeoPoint(10, 10));
  pts.emplace_back(10.001, 10.001);
  const BallTree tree = build_index(pts, 4);
  check_structure(tree);
  const auto hit = tree.nearest({10, 10});
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->distance, 0.0);
  EXPECT_EQ(hit->index, 0u);  // lowest index among ties
}

TEST(BallTree, ExactHitHasZeroDistance) {
  std::mt19937_64 rng(2);
  const auto pts = random_points(rng, 300);
  const BallTree tree = build_index(pts);
  for (std::size_t i = 0; i < pts.size(); i += 17) {
    const auto hit = tree.nearest(pts[i]);
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->distance, 0.0);
    EXPECT_EQ(hit->index, i);
  }
}

TEST(BallTree, EquidistantTieKeepsDistance) {
  const std::vector<GeoPoint> pts{{0, 1}, {0, -1}};
  const BallTree tree = build_index(pts, 1);
  const auto hit = tree.nearest({0, 0});
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->distance, haversine_distance({0, 0}, {0, 1}));
  EXPECT_EQ(hit->index, 0u);
}

TEST(BallTree, NearestMatchesBruteForce) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 2000;
    const auto pts = random_points(rng, n);
    const BallTree tree = build_index(pts, 1 + rng() % 32);
    const auto queries = random_points(rng, 100, 32.79, -117.31, 0.12);
    for (const auto& q : queries) {
      const auto a = tree.nearest(q);
      const auto b = nearest_brute_force(pts, q);
      ASSERT_TRUE(a && b);
      ASSERT_EQ(a->distance, b->distance);
      ASSERT_EQ(a->index, b->index);
    }
  }
}

TEST(BallTree, WithinRadiusMatchesBruteForce) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> radius(0.0, 3000.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = random_points(rng, 1 + rng() % 1500);
    const BallTree tree = build_index(pts);
    for (const auto& q : random_points(rng, 50)) {
      const double r = radius(rng);
      ASSERT_EQ(tree.within_radius(q, r), within_radius_brute_force(pts, q, r));
    }
  }
}

TEST(BallTree, WithinRadiusEdges) {
  std::mt19937_64 rng(9);
  const auto pts = random_points(rng, 200);
  const BallTree tree = build_index(pts);
  const auto only = tree.within_radius(pts[37], 0.0);
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only[0].index, 37u);
  EXPECT_EQ(tree.within_radius(pts[0], 25'000'000.0).size(), pts.size());
  EXPECT_THROW(tree.within_radius(pts[0], -1.0), Error);

  const auto sorted = tree.within_radius(pts[5], 2000.0);
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.distance < b.distance;
  }));
}

TEST(BallTree, SublinearDistanceEvaluations) {
  std::mt19937_64 rng(77);
  const auto pts = random_points(rng, 10'000);
  const BallTree tree = build_index(pts);
  QueryStats stats;
  const auto queries = random_points(rng, 100);
  for (const auto& q : queries) tree.nearest(q, &stats);
  const double mean = static_cast<double>(stats.distance_evals) / queries.size();
  EXPECT_LT(mean, pts.size() / 4.0);
}

TEST(BallTree, DeterministicConstruction) {
  std::mt19937_64 rng(4);
  const auto pts = random_points(rng, 777);
  const BallTree a = build_index(pts);
  const BallTree b = build_index(pts);
  EXPECT_EQ(a.order(), b.order());
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    EXPECT_EQ(a.nodes()[i].center, b.nodes()[i].center);
    EXPECT_EQ(a.nodes()[i].radius, b.nodes()[i].radius);
  }
}

TEST(BatchKernels, ParallelMatchesSerialReference) {
  std::mt19937_64 rng(8);
  const auto pts = random_points(rng, 3000);
  const auto queries = random_points(rng, 500);
  const BallTree tree = build_index(pts);
  const auto tree_batch = nearest_batch(tree, queries);
  const auto brute_batch = nearest_brute_force_batch(pts, queries);
  ASSERT_EQ(tree_batch.size(), queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto ref = nearest_brute_force(pts, queries[i]);
    ASSERT_EQ(tree_batch[i], ref);
    ASSERT_EQ(brute_batch[i], ref);
    ASSERT_EQ(nearest_brute_force_parallel(pts, queries[i]), ref);
  }
  EXPECT_FALSE(nearest_brute_force_parallel({}, {0, 0}).has_value());
}
