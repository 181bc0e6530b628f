#include "pedmap/advisory.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "csv.hpp"
#include "parse_util.hpp"

namespace pedmap {

void AdvisoryConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(reaction_time_s) || reaction_time_s <= 0.0) {
    throw Error("reaction time must be > 0");
  }
  if (!finite(safety_factor) || safety_factor <= 0.0) throw Error("safety factor must be > 0");
  if (!finite(sampling_distance_m) || sampling_distance_m <= 0.0) {
    throw Error("sampling distance must be > 0");
  }
  if (!finite(friction) || !finite(grade) || friction + grade <= 0.0) {
    throw Error("non-positive braking denominator: friction + grade must be > 0");
  }
  if (!finite(heading_threshold_deg) || heading_threshold_deg <= 0.0 ||
      heading_threshold_deg > 180.0) {
    throw Error("heading threshold must be in (0, 180]");
  }
  if (min_count < 1) throw Error("min count must be >= 1");
}

double stopping_distance(double speed_kmh, const AdvisoryConfig& cfg) {
  if (!(cfg.friction + cfg.grade > 0.0)) {
    throw Error("non-positive braking denominator: friction + grade must be > 0");
  }
  if (!(speed_kmh >= 0.0) || !std::isfinite(speed_kmh)) {
    throw Error("speed must be a finite non-negative value");
  }
  const double reaction = 0.278 * cfg.reaction_time_s * speed_kmh;
  const double braking = speed_kmh * speed_kmh / (254.0 * (cfg.friction + cfg.grade));
  return cfg.safety_factor * (reaction + braking);
}

// ---------------------------------------------------------------------------
// DriveTrace

DriveTrace::DriveTrace(std::string clip_id, std::vector<TraceFix> fixes)
    : clip_id_(std::move(clip_id)), fixes_(std::move(fixes)) {
  cumulative_.reserve(fixes_.size());
  double arc = 0.0;
  for (std::size_t i = 0; i < fixes_.size(); ++i) {
    if (i > 0) {
      const auto& prev = fixes_[i - 1];
      const auto& cur = fixes_[i];
      if (cur.timestamp_ms <= prev.timestamp_ms) {
        throw Error("trace '" + clip_id_ + "': timestamps must be strictly increasing (fix " +
                    std::to_string(i) + ")");
      }
      if (std::abs(cur.position.lon() - prev.position.lon()) >= 180.0) {
        throw Error("trace '" + clip_id_ + "': longitude jump of 180 degrees or more at fix " +
                    std::to_string(i));
      }
      arc += haversine_distance(prev.position, cur.position);
    }
    cumulative_.push_back(arc);
  }
}

std::vector<DriveTrace> parse_drive_traces(std::istream& in) {
  struct Row {
    TraceFix fix;
    std::size_t line;
  };
  std::map<std::string, std::vector<Row>> by_clip;
  csv::read(in, kDriveCsvHeader, [&](const auto& f, std::size_t line) {
    Row row;
    row.line = line;
    row.fix.timestamp_ms = csv::parse_number<std::int64_t>(f[0], line, "timestamp");
    row.fix.position = detail::parse_position(f[1], f[2], line);
    const std::string clip(f[3]);
    if (clip.empty()) throw ParseError(line, "empty clip_id");
    by_clip[clip].push_back(row);
  });

  std::vector<DriveTrace> out;
  for (auto& [clip, rows] : by_clip) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.fix.timestamp_ms < b.fix.timestamp_ms;
    });
    std::vector<TraceFix> fixes;
    fixes.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].fix.timestamp_ms == rows[i - 1].fix.timestamp_ms) {
        throw ParseError(rows[i].line, "duplicate timestamp " +
                                           std::to_string(rows[i].fix.timestamp_ms) +
                                           " in clip '" + clip + "'");
      }
      fixes.push_back(rows[i].fix);
    }
    out.emplace_back(clip, std::move(fixes));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kinematics and checkpoints

Kinematics segment_kinematics(const DriveTrace& trace, std::size_t segment) {
  const auto& fixes = trace.fixes();
  if (fixes.size() < 2 || segment + 1 >= fixes.size()) {
    throw Error("segment index out of range");
  }
  const auto& cum = trace.cumulative_m();
  const auto& a = fixes[segment];
  const auto& b = fixes[segment + 1];
  const double length = cum[segment + 1] - cum[segment];
  const double seconds = static_cast<double>(b.timestamp_ms - a.timestamp_ms) / 1000.0;

  Kinematics k;
  k.position = a.position;
  k.timestamp_ms = a.timestamp_ms;
  k.segment = segment;
  k.speed_kmh = length / seconds * 3.6;

  std::size_t moving = segment;
  while (cum[moving + 1] - cum[moving] < kCoincidentM) {
    if (moving == 0) {
      throw Error("degenerate trace '" + trace.clip_id() +
                  "': no movement before fix " + std::to_string(segment + 1));
    }
    --moving;
  }
  if (length < kCoincidentM) k.speed_kmh = 0.0;
  k.heading = initial_bearing(fixes[moving].position, fixes[moving + 1].position);
  return k;
}

Kinematics estimate_kinematics(const DriveTrace& trace, double arc_m) {
  const auto& fixes = trace.fixes();
  if (fixes.size() < 2) throw Error("trace needs at least 2 fixes");
  if (!(arc_m >= 0.0) || arc_m > trace.total_length_m()) {
    throw Error("arc position " + std::to_string(arc_m) + " m outside trace [0, " +
                std::to_string(trace.total_length_m()) + "]");
  }
  const auto& cum = trace.cumulative_m();
  auto it = std::upper_bound(cum.begin(), cum.end(), arc_m);
  std::size_t seg = static_cast<std::size_t>(it - cum.begin()) - 1;
  seg = std::min(seg, fixes.size() - 2);

  Kinematics k = segment_kinematics(trace, seg);
  const double length = cum[seg + 1] - cum[seg];
  const double fraction = length > 0.0 ? std::clamp((arc_m - cum[seg]) / length, 0.0, 1.0) : 0.0;
  k.position = interpolate_along(fixes[seg].position, fixes[seg + 1].position, fraction);
  const auto dt = fixes[seg + 1].timestamp_ms - fixes[seg].timestamp_ms;
  k.timestamp_ms = fixes[seg].timestamp_ms +
                   static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(dt)));
  return k;
}

std::vector<Checkpoint> checkpoints(const DriveTrace& trace, double sampling_distance_m) {
  if (!(sampling_distance_m > 0.0) || !std::isfinite(sampling_distance_m)) {
    throw Error("sampling distance must be > 0");
  }
  if (trace.fixes().size() < 2) throw Error("trace needs at least 2 fixes");
  const double total = trace.total_length_m();
  std::vector<Checkpoint> out;
  for (std::uint64_t m = 0;; ++m) {
    const double arc = static_cast<double>(m) * sampling_distance_m;
    if (arc > total) break;
    const Kinematics k = estimate_kinematics(trace, arc);
    out.push_back({arc, k.position, k.heading, k.speed_kmh, k.timestamp_ms});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decisions

AdvisoryDecision evaluate_checkpoint(const Checkpoint& cp, const HotspotMap& map,
                                     const AdvisoryConfig& cfg) {
  AdvisoryDecision d;
  d.checkpoint = cp;
  d.stopping_distance_m = stopping_distance(cp.speed_kmh, cfg);
  if (map.empty()) return d;

  const auto& nodes = map.nodes();
  for (const auto& hit : map.index().within_radius(cp.position, d.stopping_distance_m)) {
    if (nodes[hit.index].count < cfg.min_count) continue;
    const double sep = hit.distance < kCoincidentM
                           ? 0.0
                           : angular_separation(cp.heading,
                                                initial_bearing(cp.position, nodes[hit.index].position));
    if (sep > cfg.heading_threshold_deg) continue;
    d.active = true;
    d.nearest_front_m = hit.distance;
    d.nearest_front_sep_deg = sep;
    d.nearest_front_node = hit.index;
    break;
  }
  return d;
}

std::vector<Transition> derive_transitions(const std::vector<AdvisoryDecision>& decisions) {
  std::vector<Transition> out;
  bool on = false;
  for (const auto& d : decisions) {
    if (d.active != on) {
      on = d.active;
      out.push_back({d.checkpoint.arc_m, d.checkpoint.position,
                     on ? TransitionKind::kOn : TransitionKind::kOff});
    }
  }
  return out;
}

AdvisoryTimeline run_replay(const DriveTrace& trace, const HotspotMap& map,
                            const AdvisoryConfig& cfg) {
  cfg.validate();
  AdvisoryTimeline timeline;
  timeline.clip_id = trace.clip_id();
  timeline.sampling_distance_m = cfg.sampling_distance_m;
  if (!map.empty()) map.build_index();
  for (const auto& cp : checkpoints(trace, cfg.sampling_distance_m)) {
    timeline.decisions.push_back(evaluate_checkpoint(cp, map, cfg));
  }
  timeline.transitions = derive_transitions(timeline.decisions);
  return timeline;
}

}  // namespace pedmap
