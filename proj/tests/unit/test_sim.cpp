#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hop/errors.hpp"
#include "hop/runtime.hpp"
#include "hop/sim.hpp"
#include "test_support.hpp"

using namespace hop;

namespace {

const SimResources& resources() {
  static const SimResources res = RuntimeConfig::defaults(test::dataDir()).loadResources();
  return res;
}

Scenario scenario(const std::string& name) { return Scenario::load(test::dataDir() / "scenarios" / (name + ".json")); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Gaussian, DeterministicAndStandard) {
  GaussianSource a(5), b(5);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    ASSERT_EQ(x, b.next());
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(SimStep, HoldAtTarget) {
  const TruthScript truth;
  const SimState s = simInit(truth, 1);
  ServoCommand cmd;
  const SimState next = simStep(s, cmd, ServoCalibration::defaults(), 0.01, truth);
  EXPECT_EQ(next.q, s.q);
  EXPECT_EQ(next.time, 0.01);
  EXPECT_THROW(simStep(s, cmd, ServoCalibration::defaults(), 0.0, truth), InvalidArgument);
}

TEST(SimStep, StepResponseTimeConstant) {
  const TruthScript truth;
  const ServoCalibration cal = ServoCalibration::defaults();
  for (double effort : {1.0, 0.5}) {
    SimState s = simInit(truth, 1);
    ServoCommand cmd;
    cmd.joints[4].targetTicks = 2048 + 512;
    cmd.joints[4].effort = effort;
    const double target = ticksToAngle(2048 + 512, cal[4]);
    const double tau = kServoTimeConstant / effort;
    const int steps = 60;
    for (int k = 0; k < steps; ++k) s = simStep(s, cmd, cal, tau / steps, truth);
    EXPECT_NEAR(s.q[4] / target, 1.0 - std::exp(-1.0), 1e-12);
    EXPECT_NEAR(s.q[4] / target, 0.632, 1e-3);
  }
}

TEST(SimStep, ZeroEffortHolds) {
  const TruthScript truth;
  std::array<double, kNumJoints> q0{};
  q0[2] = 0.3;
  SimState s = simInit(truth, 1, q0);
  ServoCommand cmd;
  cmd.joints[2].effort = 0.0;
  s = simStep(s, cmd, ServoCalibration::defaults(), 0.01, truth);
  EXPECT_EQ(s.q[2], 0.3);
}

TEST(Imu, NoiselessExamples) {
  TruthScript truth;
  SimState s = simInit(truth, 1);
  const ImuSample a = synthesizeImu(s, ImuNoiseConfig::none(), 0.01);
  EXPECT_EQ(a.accel, Vec3(0, 0, kGravity));
  EXPECT_EQ(a.mag, Vec3(1, 0, 0));
  truth.yawRate = 0.7;
  s = simStep(simInit(truth, 1), ServoCommand{}, ServoCalibration::defaults(), 0.01, truth);
  const ImuSample b = synthesizeImu(s, ImuNoiseConfig::none(), 0.01);
  EXPECT_NEAR(b.gyro.z(), 0.7, 1e-6);
  EXPECT_NEAR(b.gyro.x(), 0.0, 1e-6);
}

TEST(Imu, SeededStreamIsReproducible) {
  TruthScript truth;
  truth.swayPitch = 0.05;
  truth.swayFreq = 1.0;
  const auto stream = [&] {
    SimState s = simInit(truth, 77);
    std::vector<double> v;
    for (int k = 0; k < 200; ++k) {
      const ImuSample i = synthesizeImu(s, ImuNoiseConfig{}, 0.01);
      v.insert(v.end(), {i.gyro.x(), i.gyro.y(), i.gyro.z(), i.accel.x(), i.mag.y()});
      s = simStep(s, ServoCommand{}, ServoCalibration::defaults(), 0.01, truth);
    }
    return v;
  };
  EXPECT_EQ(stream(), stream());
}

TEST(TruthScript, BodyRateMatchesAttitudeDerivative) {
  TruthScript truth;
  truth.initial = {0.2, 0.05, -0.03, 1};
  truth.swayPitch = 0.04;
  truth.swayRoll = 0.03;
  truth.swayFreq = 0.8;
  truth.yawRate = 0.3;
  truth.disturbances.push_back({1.0, 0.3, 0.1, -0.05});
  const double h = 1e-4;
  for (double t = 0.25; t < 2.0; t += 0.1) {
    const RotationQuat dq = truth.attitude(t - h).inverse() * truth.attitude(t + h);
    const Vec3 w = 2.0 * Vec3(dq.x(), dq.y(), dq.z()) / (2 * h);
    EXPECT_LT((w - truth.bodyRate(t)).norm(), 1e-5);
  }
}

TEST(Scenario, GaitRunIsDeterministic) {
  const Scenario sc = scenario("gait_walk_10s");
  RunSummary s1, s2;
  const std::string a = runScenarioLog(sc, resources(), &s1);
  const std::string b = runScenarioLog(sc, resources(), &s2);
  EXPECT_EQ(a, b);
  const auto rows = lines(a);
  EXPECT_EQ(rows.front(), logHeader());
  EXPECT_GE(rows.size() - 1, static_cast<std::size_t>(10 * sc.rate));
  EXPECT_LT(s1.rmsTiltError, 2.0 * kPi / 180.0);
}

TEST(Scenario, DifferentSeedChangesLog) {
  Scenario sc = scenario("gait_walk_10s");
  sc.duration = 1.0;
  const std::string a = runScenarioLog(sc, resources());
  sc.seed += 1;
  EXPECT_NE(a, runScenarioLog(sc, resources()));
}

TEST(Scenario, DisturbanceTracking) {
  RunSummary s;
  runScenarioLog(scenario("disturbance_standard"), resources(), &s);
  EXPECT_LT(s.rmsTiltError, 2.0 * kPi / 180.0);
}

TEST(Scenario, GetUpCompletes) {
  RunSummary s;
  runScenarioLog(scenario("getup_prone"), resources(), &s);
  EXPECT_TRUE(s.motionCompleted);
}

TEST(Scenario, SchemaErrors) {
  Json doc = readJsonFile(test::dataDir() / "scenarios" / "gait_walk_10s.json");
  doc["bogus"] = 1;
  EXPECT_THROW(Scenario::fromJson(doc, test::dataDir()), SchemaError);
}

TEST(Scenario, ControllerFailureCarriesTick) {
  Scenario sc = scenario("gait_walk_10s");
  SimResources res = resources();
  res.gait.aStep = 5.0;  // pushes the leg extension outside [0, 1]
  try {
    runScenarioLog(sc, res);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_GE(e.tick(), 0);
  }
}

TEST(Scenario, MetadataNamesGenerator) {
  const Json meta = logMetadata(scenario("gait_walk_10s"));
  EXPECT_EQ(meta.dump().find(std::string(kNoiseGenerator)) != std::string::npos, true);
}
