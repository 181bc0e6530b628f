#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pedmap/cli.hpp"
#include "pedmap/formats.hpp"
#include "test_support.hpp"

using namespace pedmap;
using namespace pedmap::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pedmap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pedmap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  // Training log placing pedestrians at `spot` during one second of clip `clip`.
  std::string training_csv(const std::string& name, const GeoPoint& spot, const std::string& clip,
                           std::int64_t t0 = 0) const {
    std::ostringstream csv;
    csv.precision(12);
    csv << "timestamp,latitude,longitude,pedestrian_count,clip_id\n";
    for (int i = 0; i < 5; ++i) {
      csv << t0 + i * 200 << ',' << spot.lat() << ',' << spot.lon() << ',' << (i == 2 ? 2 : 1) << ','
          << clip << '\n';
    }
    return write(name, csv.str());
  }

  std::string drive_csv(const std::string& name, const DriveTrace& trace) const {
    std::ostringstream csv;
    csv.precision(12);
    csv << "timestamp,latitude,longitude,clip_id\n";
    for (const auto& f : trace.fixes()) {
      csv << f.timestamp_ms << ',' << f.position.lat() << ',' << f.position.lon() << ','
          << trace.clip_id() << '\n';
    }
    return write(name, csv.str());
  }

  // One hotspot 100 m up a 201 m northbound drive, with a map built via the CLI.
  void single_hotspot_scene() {
    const GeoPoint start(32.87, -117.24);
    spot_ = north_of(start, 100.0);
    ASSERT_EQ(run({"build", training_csv("train.csv", spot_, "train"), "-o", path("map.json")}).code, 0);
    drive_ = drive_csv("drive.csv", straight_north(start, 201.0, 50.0, 100, "drive"));
  }

  fs::path dir_;
  GeoPoint spot_;
  std::string drive_;
};

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_F(Cli, BuildReportsNodeCount) {
  const auto r = run({"build", training_csv("a.csv", {32.87, -117.24}, "a"), "-o", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "built map with 1 nodes from 5 records\n");
  std::ifstream in(path("m.json"));
  const auto map = read_map_json(in);
  ASSERT_EQ(map.size(), 1u);
  EXPECT_EQ(map.nodes()[0].count, 2u);
}

TEST_F(Cli, TwoCsvsEqualBuildThenMerge) {
  const auto a = training_csv("a.csv", {32.87, -117.24}, "a");
  const auto b = training_csv("b.csv", {32.88, -117.25}, "b", 5000);
  ASSERT_EQ(run({"build", a, b, "-o", path("both.json")}).code, 0);
  ASSERT_EQ(run({"build", a, "-o", path("a.json")}).code, 0);
  ASSERT_EQ(run({"build", b, "-o", path("b.json")}).code, 0);
  const auto r = run({"merge", path("a.json"), path("b.json"), "-o", path("merged.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "merged map has 2 nodes\n");
  EXPECT_EQ(slurp(path("both.json")), slurp(path("merged.json")));
}

TEST_F(Cli, MalformedCsvFailsWithoutOutput) {
  const auto bad = write("bad.csv",
                         "timestamp,latitude,longitude,pedestrian_count,clip_id\n"
                         "0,32.8,-117.2,1,a\n"
                         "200,abc,-117.2,1,a\n");
  const auto r = run({"build", bad, "-o", path("m.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("bad.csv"), std::string::npos);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(Cli, ReplaySingleHotspotOneOnOneOff) {
  single_hotspot_scene();
  const auto r = run({"replay", "--map", path("map.json"), "--trace", drive_});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  bool prev = false;
  int on = 0, off = 0;
  while (std::getline(lines, line)) {
    const bool active = nlohmann::json::parse(line)["active"].get<bool>();
    if (active && !prev) ++on;
    if (!active && prev) ++off;
    prev = active;
  }
  EXPECT_EQ(on, 1);
  EXPECT_EQ(off, 1);
  EXPECT_NE(r.err.find("2 transitions"), std::string::npos);
}

TEST_F(Cli, FinerSamplingGivesMoreCheckpoints) {
  single_hotspot_scene();
  const auto k2 = run({"replay", "--map", path("map.json"), "--trace", drive_, "--sampling-distance", "2"});
  const auto k5 = run({"replay", "--map", path("map.json"), "--trace", drive_, "--sampling-distance", "5"});
  ASSERT_EQ(k2.code, 0);
  ASSERT_EQ(k5.code, 0);
  EXPECT_EQ(count_lines(k2.out), 101u);
  EXPECT_EQ(count_lines(k5.out), 41u);
}

TEST_F(Cli, ZeroBrakingDenominatorFails) {
  single_hotspot_scene();
  const auto r = run({"replay", "--map", path("map.json"), "--trace", drive_, "--friction", "0",
                      "--grade", "0", "-o", path("t.jsonl")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("non-positive braking denominator"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("t.jsonl")));
}

TEST_F(Cli, ParkedTraceFails) {
  single_hotspot_scene();
  const auto parked = write("parked.csv",
                            "timestamp,latitude,longitude,clip_id\n"
                            "0,32.87,-117.24,p\n1000,32.87,-117.24,p\n");
  const auto r = run({"replay", "--map", path("map.json"), "--trace", parked});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("degenerate"), std::string::npos);
}

TEST_F(Cli, SweepDefaultsAndSingleK) {
  single_hotspot_scene();
  const auto gt = write("gt.json", R"([{"clip_id": "drive", "start_m": 90, "end_m": 110, "label": "x"}])");
  const auto def = run({"sweep", "--map", path("map.json"), "--trace", drive_, "--ground-truth", gt});
  ASSERT_EQ(def.code, 0) << def.err;
  EXPECT_EQ(count_lines(def.out), 5u);
  EXPECT_EQ(def.out.rfind("K_m\tprecision\trecall\tcorrect\tfalse\tmissed\n", 0), 0u);
  EXPECT_NE(def.out.find("\n2\t1\t1\t1\t0\t0\n"), std::string::npos);

  const auto one = run({"sweep", "--map", path("map.json"), "--trace", drive_, "--ground-truth", gt,
                        "--ks", "2"});
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(count_lines(one.out), 2u);

  const auto md = run({"sweep", "--map", path("map.json"), "--trace", drive_, "--ground-truth", gt,
                       "--format", "md", "--ks", "2,3"});
  ASSERT_EQ(md.code, 0);
  EXPECT_NE(md.out.find("| 3 |"), std::string::npos);

  const auto ev = run({"eval", "--map", path("map.json"), "--trace", drive_, "--ground-truth", gt});
  ASSERT_EQ(ev.code, 0);
  EXPECT_EQ(count_lines(ev.out), 2u);
}

TEST_F(Cli, GroundTruthForWrongClipFails) {
  single_hotspot_scene();
  const auto gt = write("gt.json", R"([{"clip_id": "other", "start_m": 90, "end_m": 110}])");
  const auto r = run({"sweep", "--map", path("map.json"), "--trace", drive_, "--ground-truth", gt});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("other"), std::string::npos);
}

TEST_F(Cli, ExportEmptyAndPopulated) {
  write("empty.json", "{\"schema_version\": 1, \"nodes\": []}\n");
  const auto e = run({"export", "--map", path("empty.json")});
  ASSERT_EQ(e.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(e.out)["features"].empty());

  const auto a = training_csv("a.csv", {32.87, -117.24}, "a");
  const auto b = training_csv("b.csv", {32.88, -117.25}, "a", 3000);
  ASSERT_EQ(run({"build", a, b, "-o", path("m.json")}).code, 0);
  ASSERT_EQ(run({"export", "--map", path("m.json"), "-o", path("m.geojson")}).code, 0);
  std::ifstream in(path("m.geojson"));
  const auto back = read_geojson(in);
  std::ifstream min(path("m.json"));
  const auto orig = read_map_json(min);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(back.nodes()[i].position.lat(), orig.nodes()[i].position.lat(), 1e-9);
    EXPECT_NEAR(back.nodes()[i].position.lon(), orig.nodes()[i].position.lon(), 1e-9);
  }
}

TEST_F(Cli, UnreadableMapFails) {
  write("junk.json", "{ nope");
  EXPECT_NE(run({"export", "--map", path("junk.json")}).code, 0);
  EXPECT_NE(run({"export", "--map", path("missing.json")}).code, 0);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  single_hotspot_scene();
  const auto gt = write("gt.json", R"([{"clip_id": "drive", "start_m": 90, "end_m": 110}])");
  const std::vector<std::string> sweep{"sweep", "--map", path("map.json"), "--trace", drive_,
                                       "--ground-truth", gt, "--format", "md"};
  EXPECT_EQ(run(sweep).out, run(sweep).out);
  const std::vector<std::string> replay{"replay", "--map", path("map.json"), "--trace", drive_};
  EXPECT_EQ(run(replay).out, run(replay).out);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"bogus"}).code, 0);
  EXPECT_NE(run({"build"}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

#ifdef PEDMAP_CLI_PATH
TEST_F(Cli, BinaryExitCodes) {
  single_hotspot_scene();
  const std::string bin = PEDMAP_CLI_PATH;
  const std::string ok = bin + " replay --map " + path("map.json") + " --trace " + drive_ + " -o " +
                         path("t.jsonl") + " 2>/dev/null";
  EXPECT_EQ(std::system(ok.c_str()), 0);
  EXPECT_EQ(count_lines(slurp(path("t.jsonl"))), 101u);
  const std::string bad = bin + " replay --map " + path("map.json") + " --trace " + drive_ +
                          " --friction 0 2>/dev/null";
  EXPECT_NE(std::system(bad.c_str()), 0);
}
#endif
