#pragma once

// Training side: drive-log parsing, 1-second interval binning, per-interval
// median aggregation into hotspot nodes, and map merging across drives.

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pedmap/geodesy.hpp"
#include "pedmap/spatial_index.hpp"

namespace pedmap {

/// Exact header line of a training log.
inline constexpr const char* kDetectionCsvHeader =
    "timestamp,latitude,longitude,pedestrian_count,clip_id";

inline constexpr std::int64_t kIntervalMs = 1000;

struct DetectionRecord {
  std::int64_t timestamp_ms = 0;
  GeoPoint position;
  std::uint32_t pedestrian_count = 0;
  std::string clip_id;
};

struct Interval {
  std::string clip_id;
  std::int64_t index = 0;     ///< floor(timestamp / 1000)
  std::int64_t start_ms = 0;  ///< index * 1000
  std::int64_t end_ms = 0;    ///< start_ms + 1000, exclusive
  std::vector<GeoPoint> fixes;
  std::vector<std::uint32_t> counts;
};

struct HotspotNode {
  GeoPoint position;
  std::uint32_t count = 0;
  std::int64_t timestamp_ms = 0;
  std::string clip_id;

  friend bool operator==(const HotspotNode&, const HotspotNode&) = default;
};

/// How per-fix pedestrian counts inside one interval combine into c_k.
enum class CountMode { kMax, kSum };

CountMode parse_count_mode(const std::string& text);
const char* to_string(CountMode mode) noexcept;

/// The trained artifact: hotspot nodes plus a ball tree over their positions.
///
/// The index is built on first use (or explicitly via build_index()) and is
/// shared between copies. Building is guarded, so concurrent readers of one
/// map are safe. Mutating the node list replaces the index cache.
class HotspotMap {
 public:
  HotspotMap();
  explicit HotspotMap(std::vector<HotspotNode> nodes, std::size_t leaf_size = kDefaultLeafSize);

  const std::vector<HotspotNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  void add(HotspotNode node);

  const BallTree& index() const;
  void build_index() const { (void)index(); }
  bool has_index() const noexcept;

 private:
  struct IndexCache;

  std::vector<HotspotNode> nodes_;
  std::size_t leaf_size_;
  std::shared_ptr<IndexCache> cache_;
};

/// Parses a training CSV. Rows come back sorted by (clip_id, timestamp);
/// the sort is stable so equal timestamps keep file order.
/// Throws ParseError carrying the offending line number.
std::vector<DetectionRecord> parse_detection_log(std::istream& in);

/// Bins records into per-clip 1-second intervals. Input must already be
/// sorted by (clip_id, timestamp).
std::vector<Interval> split_intervals(const std::vector<DetectionRecord>& records);

/// Component-wise median position and combined count of one interval;
/// nullopt when the combined count is zero.
std::optional<HotspotNode> aggregate_interval(const Interval& interval,
                                              CountMode mode = CountMode::kMax);

HotspotMap build_map(std::vector<DetectionRecord> records, CountMode mode = CountMode::kMax);

/// Multiset union: nodes of `a` followed by nodes of `b`.
HotspotMap merge_maps(const HotspotMap& a, const HotspotMap& b);

}  // namespace pedmap
