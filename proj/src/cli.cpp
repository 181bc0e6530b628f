#include "pedmap/cli.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pedmap/advisory.hpp"
#include "pedmap/evaluation.hpp"
#include "pedmap/formats.hpp"
#include "pedmap/ingest.hpp"

namespace pedmap {

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string out_path;
  std::string count_mode = "max";
  std::string map_path;
  std::string trace_path;
  std::string clip;
  std::string ground_truth_path;
  std::string format = "tsv";
  std::vector<double> ks{2.0, 3.0, 4.0, 5.0};
  double onset_margin = -1.0;
  AdvisoryConfig cfg;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

/// Everything is rendered into memory first so a failed command never
/// leaves a partial output file behind.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write '" + path + "'");
  file << text;
  if (!file.flush()) throw Error("failed writing '" + path + "'");
}

HotspotMap load_map(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_map_json(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

DriveTrace load_trace(const std::string& path, const std::string& clip) {
  auto in = open_input(path);
  std::vector<DriveTrace> traces;
  try {
    traces = parse_drive_traces(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
  if (traces.empty()) throw Error(path + ": no trace rows");
  if (clip.empty()) {
    if (traces.size() > 1) {
      throw Error(path + ": " + std::to_string(traces.size()) +
                  " clips present, choose one with --clip");
    }
    return traces.front();
  }
  for (auto& t : traces) {
    if (t.clip_id() == clip) return t;
  }
  throw Error(path + ": no clip '" + clip + "'");
}

std::vector<GroundTruthWindow> load_windows(const std::string& path, const std::string& clip) {
  auto in = open_input(path);
  std::vector<GroundTruthWindow> all;
  try {
    all = read_ground_truth(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
  std::vector<GroundTruthWindow> mine;
  for (auto& w : all) {
    if (w.clip_id == clip) mine.push_back(std::move(w));
  }
  if (!all.empty() && mine.empty()) {
    std::set<std::string> present;
    for (const auto& w : all) present.insert(w.clip_id);
    std::string listed;
    for (const auto& c : present) listed += (listed.empty() ? "'" : ", '") + c + "'";
    throw Error(path + ": no ground-truth windows for clip '" + clip + "' (file has " + listed + ")");
  }
  return mine;
}

void add_config_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--reaction-time", o.cfg.reaction_time_s, "Driver reaction time t (s)")
      ->capture_default_str();
  cmd->add_option("--friction", o.cfg.friction, "Coefficient of friction f")->capture_default_str();
  cmd->add_option("--grade", o.cfg.grade, "Road grade G")->capture_default_str();
  cmd->add_option("--safety-factor", o.cfg.safety_factor, "Multiplicative offset b")
      ->capture_default_str();
  cmd->add_option("--sampling-distance", o.cfg.sampling_distance_m, "Checkpoint spacing K (m)")
      ->capture_default_str();
  cmd->add_option("--heading-threshold", o.cfg.heading_threshold_deg,
                  "Max angle between travel direction and hotspot bearing (deg)")
      ->capture_default_str();
  cmd->add_option("--min-count", o.cfg.min_count, "Minimum hotspot pedestrian count")
      ->capture_default_str();
}

void add_replay_inputs(CLI::App* cmd, Options& o) {
  cmd->add_option("--map", o.map_path, "Map file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--trace", o.trace_path, "Test-drive CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--clip", o.clip, "Clip to replay when the trace CSV holds several");
  add_config_flags(cmd, o);
}

std::string render_report(const EvalReport& report, const std::string& format) {
  std::ostringstream text;
  if (format == "md") {
    write_report_markdown(text, report);
  } else {
    write_report_tsv(text, report);
  }
  return text.str();
}

std::optional<double> margin_flag(const Options& o) {
  if (o.onset_margin < 0.0) return std::nullopt;
  return o.onset_margin;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pedestrian hotspot maps and driver advisory replay"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "Build a hotspot map from training CSVs");
  build->add_option("csv", o.inputs, "Training CSV files")->required()->check(CLI::ExistingFile);
  build->add_option("-o,--out", o.out_path, "Output map file")->required();
  build->add_option("--count-mode", o.count_mode, "Per-interval count: max or sum")
      ->check(CLI::IsMember({"max", "sum"}))
      ->capture_default_str();

  auto* merge = app.add_subcommand("merge", "Merge map files");
  merge->add_option("maps", o.inputs, "Map files")->required()->check(CLI::ExistingFile);
  merge->add_option("-o,--out", o.out_path, "Output map file")->required();

  auto* replay = app.add_subcommand("replay", "Replay a test drive and print the advisory timeline");
  add_replay_inputs(replay, o);
  replay->add_option("-o,--out", o.out_path, "Output JSONL (default stdout)");

  auto* eval = app.add_subcommand("eval", "Score one replay against ground truth");
  auto* sweep = app.add_subcommand("sweep", "Score replays over several sampling distances");
  for (auto* cmd : {eval, sweep}) {
    add_replay_inputs(cmd, o);
    cmd->add_option("--ground-truth", o.ground_truth_path, "Ground-truth JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--onset-margin", o.onset_margin,
                    "Meters each advisory is widened by when matching "
                    "(default: K for eval, largest K for sweep)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", o.format, "tsv or md")
        ->check(CLI::IsMember({"tsv", "md"}))
        ->capture_default_str();
    cmd->add_option("-o,--out", o.out_path, "Output report (default stdout)");
  }
  sweep->add_option("--ks", o.ks, "Sampling distances (m)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* exp = app.add_subcommand("export", "Export a map as GeoJSON");
  exp->add_option("--map", o.map_path, "Map file")->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--out", o.out_path, "Output GeoJSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (build->parsed()) {
      const CountMode mode = parse_count_mode(o.count_mode);
      HotspotMap map;
      std::size_t records = 0;
      for (const auto& path : o.inputs) {
        auto in = open_input(path);
        std::vector<DetectionRecord> parsed;
        try {
          parsed = parse_detection_log(in);
        } catch (const Error& e) {
          throw Error(path + ": " + e.what());
        }
        records += parsed.size();
        map = merge_maps(map, build_map(std::move(parsed), mode));
      }
      std::ostringstream text;
      write_map_json(text, map);
      emit(o.out_path, text.str(), out);
      out << "built map with " << map.size() << " nodes from " << records << " records\n";
    } else if (merge->parsed()) {
      HotspotMap map;
      for (const auto& path : o.inputs) map = merge_maps(map, load_map(path));
      std::ostringstream text;
      write_map_json(text, map);
      emit(o.out_path, text.str(), out);
      out << "merged map has " << map.size() << " nodes\n";
    } else if (replay->parsed()) {
      o.cfg.validate();
      const HotspotMap map = load_map(o.map_path);
      const DriveTrace trace = load_trace(o.trace_path, o.clip);
      const AdvisoryTimeline timeline = run_replay(trace, map, o.cfg);
      std::ostringstream text;
      write_timeline_jsonl(text, timeline);
      emit(o.out_path, text.str(), out);
      err << "clip " << timeline.clip_id << ": " << timeline.decisions.size() << " checkpoints, "
          << timeline.transitions.size() << " transitions\n";
    } else if (eval->parsed() || sweep->parsed()) {
      o.cfg.validate();
      const HotspotMap map = load_map(o.map_path);
      const DriveTrace trace = load_trace(o.trace_path, o.clip);
      const auto windows = load_windows(o.ground_truth_path, trace.clip_id());
      const EvalReport report =
          eval->parsed()
              ? evaluate_replay(trace, map, o.cfg, windows, margin_flag(o))
              : sweep_sampling_distance(trace, map, o.cfg, o.ks, windows, margin_flag(o));
      emit(o.out_path, render_report(report, o.format), out);
    } else if (exp->parsed()) {
      const HotspotMap map = load_map(o.map_path);
      std::ostringstream text;
      write_geojson(text, map);
      emit(o.out_path, text.str(), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pedmap
