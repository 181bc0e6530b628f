#include "pedmap/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "csv.hpp"
#include "parse_util.hpp"

namespace pedmap {

CountMode parse_count_mode(const std::string& text) {
  if (text == "max") return CountMode::kMax;
  if (text == "sum") return CountMode::kSum;
  throw Error("unknown count mode '" + text + "' (expected max or sum)");
}

const char* to_string(CountMode mode) noexcept {
  return mode == CountMode::kMax ? "max" : "sum";
}

// ---------------------------------------------------------------------------
// HotspotMap

struct HotspotMap::IndexCache {
  std::once_flag once;
  std::unique_ptr<BallTree> tree;
  std::atomic<bool> ready{false};
};

HotspotMap::HotspotMap() : leaf_size_(kDefaultLeafSize), cache_(std::make_shared<IndexCache>()) {}

HotspotMap::HotspotMap(std::vector<HotspotNode> nodes, std::size_t leaf_size)
    : nodes_(std::move(nodes)), leaf_size_(leaf_size), cache_(std::make_shared<IndexCache>()) {
  if (leaf_size_ == 0) throw Error("leaf_size must be positive");
}

void HotspotMap::add(HotspotNode node) {
  if (node.count == 0) throw Error("hotspot node count must be at least 1");
  nodes_.push_back(std::move(node));
  cache_ = std::make_shared<IndexCache>();
}

const BallTree& HotspotMap::index() const {
  std::call_once(cache_->once, [this] {
    std::vector<GeoPoint> positions;
    positions.reserve(nodes_.size());
    for (const auto& n : nodes_) positions.push_back(n.position);
    cache_->tree = std::make_unique<BallTree>(std::move(positions), leaf_size_);
    cache_->ready.store(true, std::memory_order_release);
  });
  return *cache_->tree;
}

bool HotspotMap::has_index() const noexcept {
  return cache_->ready.load(std::memory_order_acquire);
}

// ---------------------------------------------------------------------------
// Parsing

std::vector<DetectionRecord> parse_detection_log(std::istream& in) {
  struct Row {
    DetectionRecord record;
    std::size_t line;
  };
  std::vector<Row> rows;
  csv::read(in, kDetectionCsvHeader, [&](const auto& f, std::size_t line) {
    Row row;
    row.line = line;
    row.record.timestamp_ms = csv::parse_number<std::int64_t>(f[0], line, "timestamp");
    row.record.position = detail::parse_position(f[1], f[2], line);
    const auto count = csv::parse_number<std::int64_t>(f[3], line, "pedestrian_count");
    if (count < 0) throw ParseError(line, "negative pedestrian_count " + std::to_string(count));
    if (count > UINT32_MAX) throw ParseError(line, "pedestrian_count too large");
    row.record.pedestrian_count = static_cast<std::uint32_t>(count);
    row.record.clip_id = std::string(f[4]);
    if (row.record.clip_id.empty()) throw ParseError(line, "empty clip_id");
    rows.push_back(std::move(row));
  });

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.record.clip_id != b.record.clip_id) return a.record.clip_id < b.record.clip_id;
    return a.record.timestamp_ms < b.record.timestamp_ms;
  });

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& prev = rows[i - 1].record;
    const auto& cur = rows[i].record;
    if (prev.clip_id == cur.clip_id &&
        std::abs(cur.position.lon() - prev.position.lon()) > 180.0) {
      throw ParseError(rows[i].line, "longitude jumps more than 180 degrees within clip '" +
                                         cur.clip_id + "' (antimeridian crossing unsupported)");
    }
  }

  std::vector<DetectionRecord> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(r.record));
  return out;
}

// ---------------------------------------------------------------------------
// Training pipeline

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

std::vector<Interval> split_intervals(const std::vector<DetectionRecord>& records) {
  std::vector<Interval> out;
  for (const auto& r : records) {
    const std::int64_t k = floor_div(r.timestamp_ms, kIntervalMs);
    if (out.empty() || out.back().clip_id != r.clip_id || out.back().index != k) {
      Interval iv;
      iv.clip_id = r.clip_id;
      iv.index = k;
      iv.start_ms = k * kIntervalMs;
      iv.end_ms = iv.start_ms + kIntervalMs;
      out.push_back(std::move(iv));
    }
    out.back().fixes.push_back(r.position);
    out.back().counts.push_back(r.pedestrian_count);
  }
  return out;
}

std::optional<HotspotNode> aggregate_interval(const Interval& interval, CountMode mode) {
  if (interval.fixes.empty()) throw Error("cannot aggregate an empty interval");
  std::uint64_t count = 0;
  for (const std::uint32_t c : interval.counts) {
    count = mode == CountMode::kMax ? std::max<std::uint64_t>(count, c) : count + c;
  }
  if (count == 0) return std::nullopt;

  std::vector<double> lats;
  std::vector<double> lons;
  lats.reserve(interval.fixes.size());
  lons.reserve(interval.fixes.size());
  for (const auto& p : interval.fixes) {
    lats.push_back(p.lat());
    lons.push_back(p.lon());
  }

  HotspotNode node;
  node.position = GeoPoint(median_of(std::move(lats)), median_of(std::move(lons)));
  node.count = static_cast<std::uint32_t>(std::min<std::uint64_t>(count, UINT32_MAX));
  node.timestamp_ms = interval.start_ms;
  node.clip_id = interval.clip_id;
  return node;
}

HotspotMap build_map(std::vector<DetectionRecord> records, CountMode mode) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.clip_id != b.clip_id) return a.clip_id < b.clip_id;
    return a.timestamp_ms < b.timestamp_ms;
  });
  std::vector<HotspotNode> nodes;
  for (const auto& iv : split_intervals(records)) {
    if (auto node = aggregate_interval(iv, mode)) nodes.push_back(std::move(*node));
  }
  return HotspotMap(std::move(nodes));
}

HotspotMap merge_maps(const HotspotMap& a, const HotspotMap& b) {
  std::vector<HotspotNode> nodes;
  nodes.reserve(a.size() + b.size());
  nodes.insert(nodes.end(), a.nodes().begin(), a.nodes().end());
  nodes.insert(nodes.end(), b.nodes().begin(), b.nodes().end());
  return HotspotMap(std::move(nodes));
}

}  // namespace pedmap
