#include "pedmap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

namespace pedmap {

std::vector<AdvisoryEvent> advisory_events(const AdvisoryTimeline& timeline) {
  std::vector<AdvisoryEvent> events;
  bool open = false;
  for (const auto& d : timeline.decisions) {
    if (d.active) {
      if (!open) events.push_back({d.checkpoint.arc_m, d.checkpoint.arc_m});
      events.back().end_m = d.checkpoint.arc_m;
      open = true;
    } else {
      open = false;
    }
  }
  return events;
}

void validate_windows(const std::vector<GroundTruthWindow>& windows) {
  std::map<std::string, std::vector<const GroundTruthWindow*>> by_clip;
  for (const auto& w : windows) {
    if (!std::isfinite(w.start_m) || !std::isfinite(w.end_m) || w.start_m < 0.0 ||
        w.start_m >= w.end_m) {
      throw Error("ground-truth window '" + w.label + "' of clip '" + w.clip_id +
                  "' must satisfy 0 <= start_m < end_m");
    }
    by_clip[w.clip_id].push_back(&w);
  }
  for (auto& [clip, ws] : by_clip) {
    for (std::size_t i = 1; i < ws.size(); ++i) {
      if (ws[i]->start_m < ws[i - 1]->end_m) {
        throw Error("ground-truth windows of clip '" + clip +
                    "' must be sorted and non-overlapping");
      }
    }
  }
}

EvalCounts match_advisories(const AdvisoryTimeline& timeline,
                            const std::vector<GroundTruthWindow>& windows,
                            double onset_margin_m) {
  if (!(onset_margin_m >= 0.0)) throw Error("onset margin must be non-negative");
  for (const auto& w : windows) {
    if (w.clip_id != timeline.clip_id) {
      throw Error("ground-truth window for clip '" + w.clip_id + "' does not match timeline clip '" +
                  timeline.clip_id + "'");
    }
  }
  validate_windows(windows);

  EvalCounts counts;
  std::vector<bool> matched(windows.size(), false);
  for (const auto& ev : advisory_events(timeline)) {
    const double lo = ev.start_m - onset_margin_m;
    const double hi = ev.end_m + onset_margin_m;
    bool hit = false;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (std::min(hi, windows[i].end_m) - std::max(lo, windows[i].start_m) > 0.0) {
        matched[i] = true;
        hit = true;
      }
    }
    ++(hit ? counts.correct : counts.false_advisories);
  }
  counts.missed = static_cast<std::size_t>(std::count(matched.begin(), matched.end(), false));
  return counts;
}

EvalCounts match_advisories(const AdvisoryTimeline& timeline,
                            const std::vector<GroundTruthWindow>& windows) {
  return match_advisories(timeline, windows, timeline.sampling_distance_m);
}

std::optional<double> precision(const EvalCounts& c) noexcept {
  const std::size_t denom = c.correct + c.false_advisories;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.correct) / static_cast<double>(denom);
}

std::optional<double> recall(const EvalCounts& c) noexcept {
  const std::size_t denom = c.correct + c.missed;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.correct) / static_cast<double>(denom);
}

namespace {

EvalRow score(const DriveTrace& trace, const HotspotMap& map, AdvisoryConfig cfg, double k,
              const std::vector<GroundTruthWindow>& windows, double margin) {
  cfg.sampling_distance_m = k;
  const AdvisoryTimeline timeline = run_replay(trace, map, cfg);
  EvalRow row;
  row.sampling_distance_m = k;
  row.counts = match_advisories(timeline, windows, margin);
  row.precision = precision(row.counts);
  row.recall = recall(row.counts);
  return row;
}

}  // namespace

EvalReport sweep_sampling_distance(const DriveTrace& trace, const HotspotMap& map,
                                   const AdvisoryConfig& cfg, std::vector<double> ks,
                                   const std::vector<GroundTruthWindow>& windows,
                                   std::optional<double> onset_margin_m) {
  if (ks.empty()) throw Error("sweep needs at least one sampling distance");
  for (const double k : ks) {
    if (!(k > 0.0) || !std::isfinite(k)) throw Error("sampling distances must be > 0");
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  cfg.validate();

  EvalReport report;
  report.clip_id = trace.clip_id();
  report.onset_margin_m = onset_margin_m.value_or(ks.back());
  report.rows.resize(ks.size());

  // The lazy index must exist before threads share the map.
  map.build_index();

  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(ks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      report.rows[i] = score(trace, map, cfg, ks[i], windows, report.onset_margin_m);
    } catch (...) {
#pragma omp critical(pedmap_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

EvalReport evaluate_replay(const DriveTrace& trace, const HotspotMap& map,
                           const AdvisoryConfig& cfg,
                           const std::vector<GroundTruthWindow>& windows,
                           std::optional<double> onset_margin_m) {
  cfg.validate();
  EvalReport report;
  report.clip_id = trace.clip_id();
  report.onset_margin_m = onset_margin_m.value_or(cfg.sampling_distance_m);
  report.rows.push_back(
      score(trace, map, cfg, cfg.sampling_distance_m, windows, report.onset_margin_m));
  return report;
}

}  // namespace pedmap
