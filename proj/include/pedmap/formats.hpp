#pragma once

// File formats exchanged with other tools.
//
//   map file      {"schema_version": 1, "nodes": [{lat, lon, count, timestamp_ms, clip_id}]}
//   GeoJSON       FeatureCollection of Points, coordinates [lon, lat],
//                 properties {count, timestamp_ms, clip_id}
//   timeline      JSON Lines, one object per checkpoint
//   ground truth  [{"clip_id", "start_m", "end_m", "label"}]
//   report        TSV "K_m precision recall correct false missed", or Markdown

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pedmap/advisory.hpp"
#include "pedmap/evaluation.hpp"
#include "pedmap/ingest.hpp"

namespace pedmap {

inline constexpr int kMapSchemaVersion = 1;

void write_map_json(std::ostream& out, const HotspotMap& map);
HotspotMap read_map_json(std::istream& in);

void write_geojson(std::ostream& out, const HotspotMap& map);
HotspotMap read_geojson(std::istream& in);

void write_timeline_jsonl(std::ostream& out, const AdvisoryTimeline& timeline);

std::vector<GroundTruthWindow> read_ground_truth(std::istream& in);

/// Marker printed for an undefined ratio (zero denominator).
inline constexpr const char* kUndefinedMarker = "—";

/// Fixed-point with at most four decimals, trailing zeros trimmed.
std::string format_decimal(double value);

void write_report_tsv(std::ostream& out, const EvalReport& report);
void write_report_markdown(std::ostream& out, const EvalReport& report);

}  // namespace pedmap
