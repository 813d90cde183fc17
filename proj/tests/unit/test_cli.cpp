#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "hop/runtime.hpp"
#include "hop/vision.hpp"
#include "test_support.hpp"

using namespace hop;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  ::setenv("HOP_DATA_DIR", test::dataDir().c_str(), 1);
  args.insert(args.begin(), "hop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cliMain(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, ConvertOrientation) {
  const CliRun q = run({"convert-orientation", "quat", "1", "0", "0", "0"});
  EXPECT_EQ(q.code, 0);
  EXPECT_EQ(q.out, "0 0 0 +1\n");
  const CliRun f = run({"convert-orientation", "fused", "0", "0.3", "0"});
  EXPECT_EQ(f.code, 0);
  const RotationQuat expected = quatFromAxisAngle(Vec3::UnitY(), 0.3);
  EXPECT_EQ(f.out, formatNumber(expected.w()) + " 0 " + formatNumber(expected.y()) + " 0\n");
  const CliRun neg = run({"convert-orientation", "fused", "-1", "0", "0", "-1"});
  EXPECT_EQ(neg.code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  const CliRun bogus = run({"bogus"});
  EXPECT_EQ(bogus.code, 1);
  EXPECT_NE(bogus.err.find("bogus"), std::string::npos);
  EXPECT_EQ(run({"convert-orientation", "quat", "1", "0"}).code, 1);
  EXPECT_EQ(run({"calibrate-camera"}).code, 1);
}

TEST(Cli, MissingScenarioIsRuntimeFailure) {
  const CliRun r = run({"gait-sim", "/nonexistent/walk.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/walk.json"), std::string::npos);
}

TEST(Cli, GaitSimWritesLogAndSidecar) {
  test::TempDir dir("cli");
  const auto out = dir.path() / "walk.csv";
  const CliRun r = run({"gait-sim", (test::dataDir() / "scenarios" / "gait_walk_10s.json").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string log = readTextFile(out);
  EXPECT_EQ(log.substr(0, log.find('\n')), logHeader());
  auto meta = out;
  meta += ".meta.json";
  EXPECT_TRUE(std::filesystem::exists(meta));
}

TEST(Cli, PlayMotionPrintsTrajectory) {
  const CliRun r = run({"play-motion", "getup_prone"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 13), "t,neck_yaw,he");
}

TEST(Cli, FilterReplay) {
  test::TempDir dir("cli");
  const auto csv = dir.path() / "imu.csv";
  std::string text = "t,gx,gy,gz,ax,ay,az,mx,my,mz\n";
  for (int k = 0; k < 10; ++k) text += formatNumber(0.01 * k) + ",0,0,0,0,0,9.81,1,0,0\n";
  writeFileAtomic(csv, text);
  const CliRun r = run({"filter-replay", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,yaw,pitch,roll,hemisphere");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 11);
}

TEST(Cli, CalibrateCamera) {
  test::TempDir dir("cli");
  const CameraFile f = CameraFile::load(test::dataDir() / "calibration" / "camera.json");
  const ViewContext ctx = f.context(test::defaultModel());
  std::string csv = "world_x,world_y,pixel_u,pixel_v\n";
  for (double x = 0.5; x < 1.6; x += 0.5)
    for (double y = -0.4; y < 0.5; y += 0.4) {
      const Pixel p = groundToPixel({x, y}, ctx, f.camera);
      csv += formatNumber(x) + "," + formatNumber(y) + "," + formatNumber(p.u) + "," + formatNumber(p.v) + "\n";
    }
  writeFileAtomic(dir.path() / "points.csv", csv);
  const auto out = dir.path() / "camera.json";
  const CliRun r = run({"calibrate-camera", "--model", (test::dataDir() / "calibration" / "camera.json").string(), "--points",
                        (dir.path() / "points.csv").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 4), "rms ");
  EXPECT_NO_THROW(CameraFile::load(out));
}
