#pragma once

// Test-drive replay against a hotspot map.
//
// A drive is sampled on a fixed arc-length grid (every K meters from the
// start). At each checkpoint the stopping distance for the current speed is
// the search radius; the advisory is active when any hotspot inside that
// radius lies within the heading threshold of the direction of travel.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "pedmap/geodesy.hpp"
#include "pedmap/ingest.hpp"

namespace pedmap {

inline constexpr const char* kDriveCsvHeader = "timestamp,latitude,longitude,clip_id";

struct AdvisoryConfig {
  double reaction_time_s = 2.5;
  double friction = 0.7;
  double grade = 0.0;
  double safety_factor = 1.0;
  double sampling_distance_m = 2.0;
  double heading_threshold_deg = 90.0;
  std::uint32_t min_count = 1;

  /// Throws Error naming the first violated constraint.
  void validate() const;
};

/// AASHTO stopping distance scaled by the safety factor, in meters, for a
/// speed in km/h:  b * (0.278 t v + v^2 / (254 (f + G))).
double stopping_distance(double speed_kmh, const AdvisoryConfig& cfg);

struct TraceFix {
  std::int64_t timestamp_ms = 0;
  GeoPoint position;
};

/// One test drive. Timestamps strictly increase and consecutive fixes differ
/// by less than 180 degrees of longitude; the constructor enforces both and
/// precomputes cumulative arc length.
class DriveTrace {
 public:
  DriveTrace(std::string clip_id, std::vector<TraceFix> fixes);

  const std::string& clip_id() const noexcept { return clip_id_; }
  const std::vector<TraceFix>& fixes() const noexcept { return fixes_; }
  /// cumulative_m()[i] is the arc length from the first fix to fix i.
  const std::vector<double>& cumulative_m() const noexcept { return cumulative_; }
  double total_length_m() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

 private:
  std::string clip_id_;
  std::vector<TraceFix> fixes_;
  std::vector<double> cumulative_;
};

/// Parses a test-drive CSV into one trace per clip, ordered by clip_id.
std::vector<DriveTrace> parse_drive_traces(std::istream& in);

struct Kinematics {
  GeoPoint position;
  Heading heading;
  double speed_kmh = 0.0;
  std::int64_t timestamp_ms = 0;
  std::size_t segment = 0;  ///< index i of the segment fix[i] -> fix[i+1]
};

/// Heading and speed of segment fix[i] -> fix[i+1]. A zero-length segment
/// has speed 0 and inherits the heading of the closest earlier moving
/// segment; if there is none the trace is degenerate and Error is thrown.
Kinematics segment_kinematics(const DriveTrace& trace, std::size_t segment);

/// Position, heading and speed at an arc position. The containing segment is
/// the last one starting at or before `arc_m` (the final segment at the end).
Kinematics estimate_kinematics(const DriveTrace& trace, double arc_m);

struct Checkpoint {
  double arc_m = 0.0;
  GeoPoint position;
  Heading heading;
  double speed_kmh = 0.0;
  std::int64_t timestamp_ms = 0;
};

/// Checkpoints at arc positions 0, K, 2K, ... not beyond the trace end.
std::vector<Checkpoint> checkpoints(const DriveTrace& trace, double sampling_distance_m);

struct AdvisoryDecision {
  Checkpoint checkpoint;
  bool active = false;
  double stopping_distance_m = 0.0;
  std::optional<double> nearest_front_m;
  std::optional<double> nearest_front_sep_deg;
  std::optional<std::size_t> nearest_front_node;
};

AdvisoryDecision evaluate_checkpoint(const Checkpoint& cp, const HotspotMap& map,
                                     const AdvisoryConfig& cfg);

enum class TransitionKind { kOn, kOff };

struct Transition {
  double arc_m = 0.0;
  GeoPoint position;
  TransitionKind kind = TransitionKind::kOn;
};

struct AdvisoryTimeline {
  std::string clip_id;
  double sampling_distance_m = 0.0;
  std::vector<AdvisoryDecision> decisions;
  /// Alternating ON/OFF, starting with ON. An OFF sits on the first inactive
  /// checkpoint after an active run.
  std::vector<Transition> transitions;
};

/// Derives transitions from the decisions' active flags.
std::vector<Transition> derive_transitions(const std::vector<AdvisoryDecision>& decisions);

AdvisoryTimeline run_replay(const DriveTrace& trace, const HotspotMap& map,
                            const AdvisoryConfig& cfg);

}  // namespace pedmap
