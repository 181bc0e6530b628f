#include "pedmap/formats.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace pedmap {

using ojson = nlohmann::ordered_json;

namespace {

ojson parse_json(std::istream& in, const char* what) {
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("invalid ") + what + " JSON: " + e.what());
  }
}

template <typename T>
T field(const ojson& obj, const char* key, const char* what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(0, std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(0, std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

const ojson& member(const ojson& obj, const char* key, const char* what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(0, std::string(what) + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

HotspotNode make_node(double lat, double lon, std::int64_t count, std::int64_t timestamp_ms,
                      std::string clip_id, const char* what) {
  if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
    throw ParseError(0, std::string(what) + ": coordinate out of range");
  }
  if (count < 1 || count > UINT32_MAX) {
    throw ParseError(0, std::string(what) + ": node count must be >= 1");
  }
  return {GeoPoint(lat, lon), static_cast<std::uint32_t>(count), timestamp_ms, std::move(clip_id)};
}

ojson nullable(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string ratio(const std::optional<double>& v) {
  return v ? format_decimal(*v) : std::string(kUndefinedMarker);
}

}  // namespace

void write_map_json(std::ostream& out, const HotspotMap& map) {
  ojson doc;
  doc["schema_version"] = kMapSchemaVersion;
  doc["nodes"] = ojson::array();
  for (const auto& n : map.nodes()) {
    doc["nodes"].push_back({{"lat", n.position.lat()},
                            {"lon", n.position.lon()},
                            {"count", n.count},
                            {"timestamp_ms", n.timestamp_ms},
                            {"clip_id", n.clip_id}});
  }
  out << doc.dump(2) << '\n';
}

HotspotMap read_map_json(std::istream& in) {
  const ojson doc = parse_json(in, "map");
  const auto version = field<int>(doc, "schema_version", "map");
  if (version != kMapSchemaVersion) {
    throw ParseError(0, "unsupported map schema_version " + std::to_string(version));
  }
  const auto& nodes = member(doc, "nodes", "map");
  if (!nodes.is_array()) throw ParseError(0, "map: 'nodes' must be an array");
  std::vector<HotspotNode> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) {
    out.push_back(make_node(field<double>(n, "lat", "map node"), field<double>(n, "lon", "map node"),
                            field<std::int64_t>(n, "count", "map node"),
                            field<std::int64_t>(n, "timestamp_ms", "map node"),
                            field<std::string>(n, "clip_id", "map node"), "map node"));
  }
  return HotspotMap(std::move(out));
}

void write_geojson(std::ostream& out, const HotspotMap& map) {
  ojson doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = ojson::array();
  for (const auto& n : map.nodes()) {
    ojson feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Point"},
                           {"coordinates", {n.position.lon(), n.position.lat()}}};
    feature["properties"] = {
        {"count", n.count}, {"timestamp_ms", n.timestamp_ms}, {"clip_id", n.clip_id}};
    doc["features"].push_back(std::move(feature));
  }
  out << doc.dump(2) << '\n';
}

HotspotMap read_geojson(std::istream& in) {
  const ojson doc = parse_json(in, "GeoJSON");
  if (field<std::string>(doc, "type", "GeoJSON") != "FeatureCollection") {
    throw ParseError(0, "GeoJSON: expected a FeatureCollection");
  }
  std::vector<HotspotNode> out;
  const auto& features = member(doc, "features", "GeoJSON");
  if (!features.is_array()) throw ParseError(0, "GeoJSON: 'features' must be an array");
  for (const auto& f : features) {
    const auto& geom = member(f, "geometry", "GeoJSON feature");
    if (field<std::string>(geom, "type", "GeoJSON geometry") != "Point") {
      throw ParseError(0, "GeoJSON: only Point features are supported");
    }
    const auto coords = field<std::vector<double>>(geom, "coordinates", "GeoJSON geometry");
    if (coords.size() < 2) throw ParseError(0, "GeoJSON: Point needs [lon, lat]");
    const auto& props = member(f, "properties", "GeoJSON feature");
    out.push_back(make_node(coords[1], coords[0],
                            field<std::int64_t>(props, "count", "GeoJSON properties"),
                            field<std::int64_t>(props, "timestamp_ms", "GeoJSON properties"),
                            field<std::string>(props, "clip_id", "GeoJSON properties"),
                            "GeoJSON feature"));
  }
  return HotspotMap(std::move(out));
}

void write_timeline_jsonl(std::ostream& out, const AdvisoryTimeline& timeline) {
  for (const auto& d : timeline.decisions) {
    const auto& cp = d.checkpoint;
    ojson line;
    line["arc_m"] = cp.arc_m;
    line["lat"] = cp.position.lat();
    line["lon"] = cp.position.lon();
    line["speed_kmh"] = cp.speed_kmh;
    line["heading_deg"] = cp.heading.degrees();
    line["stopping_distance_m"] = d.stopping_distance_m;
    line["active"] = d.active;
    line["nearest_front_m"] = nullable(d.nearest_front_m);
    line["nearest_front_sep_deg"] = nullable(d.nearest_front_sep_deg);
    out << line.dump() << '\n';
  }
}

std::vector<GroundTruthWindow> read_ground_truth(std::istream& in) {
  const ojson doc = parse_json(in, "ground truth");
  if (!doc.is_array()) throw ParseError(0, "ground truth must be a JSON array");
  std::vector<GroundTruthWindow> out;
  for (const auto& w : doc) {
    GroundTruthWindow g;
    g.clip_id = field<std::string>(w, "clip_id", "ground truth");
    g.start_m = field<double>(w, "start_m", "ground truth");
    g.end_m = field<double>(w, "end_m", "ground truth");
    g.label = w.contains("label") ? field<std::string>(w, "label", "ground truth") : "";
    out.push_back(std::move(g));
  }
  validate_windows(out);
  return out;
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

void write_report_tsv(std::ostream& out, const EvalReport& report) {
  out << "K_m\tprecision\trecall\tcorrect\tfalse\tmissed\n";
  for (const auto& r : report.rows) {
    out << format_decimal(r.sampling_distance_m) << '\t' << ratio(r.precision) << '\t'
        << ratio(r.recall) << '\t' << r.counts.correct << '\t' << r.counts.false_advisories
        << '\t' << r.counts.missed << '\n';
  }
}

void write_report_markdown(std::ostream& out, const EvalReport& report) {
  // Undefined ratios print as 0 with the marker so the table reads like a
  // published one while staying distinguishable from a measured zero.
  auto cell = [](const std::optional<double>& v) {
    return v ? format_decimal(*v) : std::string("0 (") + kUndefinedMarker + ")";
  };
  out << "Precision and Recall by Sampling Distance, clip " << report.clip_id << "\n\n";
  out << "| Sampling Distance (m) | Precision | Recall | Correct | False | Missed |\n";
  out << "|---:|---:|---:|---:|---:|---:|\n";
  bool any_undefined = false;
  for (const auto& r : report.rows) {
    any_undefined = any_undefined || !r.precision || !r.recall;
    out << "| " << format_decimal(r.sampling_distance_m) << " | " << cell(r.precision) << " | "
        << cell(r.recall) << " | " << r.counts.correct << " | " << r.counts.false_advisories
        << " | " << r.counts.missed << " |\n";
  }
  if (any_undefined) {
    out << "\n" << kUndefinedMarker << " undefined: zero denominator.\n";
  }
}

}  // namespace pedmap
