#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pedmap/advisory.hpp"

namespace pedmap {

/// Human-labelled stretch of a test drive where an advisory is expected,
/// in arc meters along that drive.
struct GroundTruthWindow {
  std::string clip_id;
  double start_m = 0.0;
  double end_m = 0.0;
  std::string label;
};

struct EvalCounts {
  std::size_t correct = 0;
  std::size_t false_advisories = 0;
  std::size_t missed = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

/// Maximal run of consecutive active checkpoints.
struct AdvisoryEvent {
  double start_m = 0.0;
  double end_m = 0.0;
};

std::vector<AdvisoryEvent> advisory_events(const AdvisoryTimeline& timeline);

/// Throws Error if a window is malformed or windows of one clip overlap.
void validate_windows(const std::vector<GroundTruthWindow>& windows);

/// Scores one timeline against the windows of the same clip.
///
/// Every advisory event is widened by `onset_margin_m` on both sides; it is
/// correct when the widened span overlaps some window with positive length
/// and false otherwise. A window no widened event overlaps is missed. One
/// event covering two windows counts once and matches both.
///
/// Throws Error when a window belongs to another clip.
EvalCounts match_advisories(const AdvisoryTimeline& timeline,
                            const std::vector<GroundTruthWindow>& windows,
                            double onset_margin_m);

/// Same, with the margin equal to the timeline's sampling distance.
EvalCounts match_advisories(const AdvisoryTimeline& timeline,
                            const std::vector<GroundTruthWindow>& windows);

/// correct / (correct + false); nullopt when no advisory was issued.
std::optional<double> precision(const EvalCounts& c) noexcept;
/// correct / (correct + missed); nullopt when both are zero.
std::optional<double> recall(const EvalCounts& c) noexcept;

struct EvalRow {
  double sampling_distance_m = 0.0;
  EvalCounts counts;
  std::optional<double> precision;
  std::optional<double> recall;
};

struct EvalReport {
  std::string clip_id;
  double onset_margin_m = 0.0;
  std::vector<EvalRow> rows;  ///< ascending sampling distance
};

/// Replays the trace once per sampling distance and scores each replay.
///
/// All rows share one onset margin, `onset_margin_m` when given and the
/// largest K otherwise, so that a coarser grid can never score a window the
/// finer nested grid misses. Rows are computed in parallel.
EvalReport sweep_sampling_distance(const DriveTrace& trace, const HotspotMap& map,
                                   const AdvisoryConfig& cfg, std::vector<double> ks,
                                   const std::vector<GroundTruthWindow>& windows,
                                   std::optional<double> onset_margin_m = std::nullopt);

/// Scores a single replay (one row) using the config's sampling distance.
EvalReport evaluate_replay(const DriveTrace& trace, const HotspotMap& map,
                           const AdvisoryConfig& cfg,
                           const std::vector<GroundTruthWindow>& windows,
                           std::optional<double> onset_margin_m = std::nullopt);

}  // namespace pedmap
