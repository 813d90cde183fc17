#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hop/errors.hpp"
#include "hop/gait.hpp"
#include "test_support.hpp"

using namespace hop;

namespace {

JointPose mirrored(const JointPose& q) {
  JointPose m;
  const auto swap = [&](Joint a, Joint b, double sign) {
    m[a] = sign * q[b];
    m[b] = sign * q[a];
  };
  m[Joint::NeckYaw] = -q[Joint::NeckYaw];
  m[Joint::HeadPitch] = q[Joint::HeadPitch];
  swap(Joint::LShoulderPitch, Joint::RShoulderPitch, 1);
  swap(Joint::LShoulderRoll, Joint::RShoulderRoll, -1);
  swap(Joint::LElbowPitch, Joint::RElbowPitch, 1);
  swap(Joint::LHipYaw, Joint::RHipYaw, -1);
  swap(Joint::LHipRoll, Joint::RHipRoll, -1);
  swap(Joint::LHipPitch, Joint::RHipPitch, 1);
  swap(Joint::LKneePitch, Joint::RKneePitch, 1);
  swap(Joint::LAnklePitch, Joint::RAnklePitch, 1);
  swap(Joint::LAnkleRoll, Joint::RAnkleRoll, -1);
  return m;
}

}  // namespace

TEST(PhaseAdvance, Examples) {
  EXPECT_EQ(phaseAdvance(0.0, 2.0, 0.25, 0.0), kPi);
  EXPECT_NEAR(phaseAdvance(0.3, 1.4, 0.01, -2 * kPi * 1.4), 0.3, 1e-15);
  EXPECT_THROW(phaseAdvance(0.0, 0.0, 0.01, 0.0), InvalidArgument);
  EXPECT_THROW(phaseAdvance(0.0, 1.0, 0.0, 0.0), InvalidArgument);
}

TEST(PhaseAdvance, Accumulation) {
  double phase = 0.0;
  for (int i = 0; i < 1000; ++i) phase = phaseAdvance(phase, 1.0, 1e-3, 0.0);
  EXPECT_NEAR(std::abs(wrapAngle(phase)), 0.0, 1e-9);
}

TEST(OpenLoop, ZeroCommandSymmetry) {
  GaitConfig c;
  c.aSway = 0.0;
  for (double phase = -3.0; phase < 3.1; phase += 0.1) {
    const AbstractPose p = openLoopWaveform(phase, {}, c);
    const AbstractPose shifted = openLoopWaveform(wrapAngle(phase - kPi), {}, c);
    EXPECT_NEAR(p.leg(Side::Right).extension, shifted.leg(Side::Left).extension, 1e-12);
    for (const auto& leg : p.legs) {
      EXPECT_EQ(leg.angleX, 0.0);
      EXPECT_EQ(leg.angleY, 0.0);
      EXPECT_EQ(leg.angleZ, 0.0);
    }
  }
}

TEST(OpenLoop, ForwardCommandAtZeroPhase) {
  const GaitConfig c;
  const AbstractPose p = openLoopWaveform(0.0, {1.0, 0, 0, true}, c);
  EXPECT_DOUBLE_EQ(p.leg(Side::Left).angleY, -c.aSag);
  EXPECT_DOUBLE_EQ(p.leg(Side::Right).angleY, c.aSag);
}

TEST(OpenLoop, StrideIntegralVanishes) {
  const GaitConfig c;
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phase = -kPi + 2 * kPi * (i + 0.5) / n;
    sum += openLoopWaveform(phase, {0.7, 0.2, -0.4, true}, c).leg(Side::Left).angleY;
  }
  EXPECT_NEAR(sum / n, 0.0, 1e-12);
}

TEST(Feedback, ZeroDeviationZeroActions) {
  EXPECT_EQ(feedbackCorrections({}, {}, 0.7, GaitConfig{}), CorrectiveActions{});
}

TEST(Feedback, PitchLinearity) {
  GaitConfig c;
  c.deadband = 0.0;
  for (ChannelGains* g : {&c.arm, &c.hipY, &c.footY, &c.hipX, &c.footX, &c.footHeight}) *g = {1.0, 0.0, 10.0};
  const CorrectiveActions a = feedbackCorrections({0.1, 0.0}, {}, 0.5, c);
  EXPECT_DOUBLE_EQ(a.armAngleY, 0.1);
  EXPECT_DOUBLE_EQ(a.hipAngleY, 0.1);
  EXPECT_DOUBLE_EQ(a.footAngleY, 0.1);
  EXPECT_EQ(a.hipAngleX, 0.0);
  EXPECT_EQ(a.footAngleX, 0.0);
  EXPECT_EQ(a.footHeight, 0.0);
  EXPECT_EQ(a.timingAdjust, 0.0);
}

TEST(Feedback, SaturationFuzz) {
  const GaitConfig c;
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int i = 0; i < 100000; ++i) {
    const CorrectiveActions a = feedbackCorrections({n(rng), n(rng)}, {n(rng), n(rng)}, n(rng), c);
    ASSERT_LE(std::abs(a.armAngleY), c.arm.sat);
    ASSERT_LE(std::abs(a.hipAngleY), c.hipY.sat);
    ASSERT_LE(std::abs(a.footAngleY), c.footY.sat);
    ASSERT_LE(std::abs(a.hipAngleX), c.hipX.sat);
    ASSERT_LE(std::abs(a.footAngleX), c.footX.sat);
    ASSERT_LE(std::abs(a.footHeight), c.footHeight.sat);
    ASSERT_LE(a.timingAdjust, 0.0);
    ASSERT_GE(a.timingAdjust, -c.timing.sat);
  }
}

TEST(Feedback, TimingWaitsForLateralReturn) {
  const GaitConfig c;
  // Left swing phase, robot leaning onto the right (support) leg.
  EXPECT_LT(feedbackCorrections({0, 0.1}, {}, 1.0, c).timingAdjust, 0.0);
  EXPECT_EQ(feedbackCorrections({0, -0.1}, {}, 1.0, c).timingAdjust, 0.0);
  EXPECT_LT(feedbackCorrections({0, -0.1}, {}, -1.0, c).timingAdjust, 0.0);
}

TEST(GaitTick, RampDerivativeTracksFiniteDifference) {
  const RobotModel& m = test::defaultModel();
  const GaitConfig c;
  GaitState s;
  const double rate = 0.05, dt = 0.01;
  for (int k = 0; k < 300; ++k) {
    const FusedAngles f{0, rate * k * dt, -rate * k * dt, 1};
    s = gaitTick(s, {0, 0, 0, true}, f, m, c, dt).state;
  }
  EXPECT_NEAR(s.deviationRate.pitch, rate, 1e-6);
  EXPECT_NEAR(s.deviationRate.roll, -rate, 1e-6);
}

TEST(GaitTick, HaltPoseWhenNotWalking) {
  const RobotModel& m = test::defaultModel();
  const GaitConfig c;
  GaitState s;
  s.phase = 1.234;
  const GaitOutput a = gaitTick(s, {0.5, 0, 0, false}, {0, 0.1, 0.05, 1}, m, c, 0.01);
  const GaitOutput b = gaitTick(a.state, {0.5, 0, 0, false}, {0, -0.2, 0.0, 1}, m, c, 0.01);
  EXPECT_EQ(a.state.phase, 1.234);
  EXPECT_EQ(b.state.phase, 1.234);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_EQ(a.targets, abstractToJoint(haltPose(c), m));
}

TEST(GaitTick, FeedbackNeutrality) {
  const RobotModel& m = test::defaultModel();
  GaitConfig withFb;
  withFb.expectedPitch = 0.03;
  withFb.expectedRoll = -0.01;
  GaitConfig open = withFb;
  open.feedbackEnabled = false;
  GaitState a, b;
  const GaitCommand cmd{0.6, -0.3, 0.2, true};
  for (int k = 0; k < 1000; ++k) {
    const GaitOutput oa = gaitTick(a, cmd, {0.2, withFb.expectedPitch, withFb.expectedRoll, 1}, m, withFb, 0.01);
    const GaitOutput ob = gaitTick(b, cmd, {}, m, open, 0.01);
    ASSERT_EQ(oa.targets, ob.targets) << "tick " << k;
    ASSERT_EQ(oa.state.phase, ob.state.phase);
    a = oa.state;
    b = ob.state;
  }
}

TEST(GaitTick, PeriodIsInverseFrequency) {
  const RobotModel& m = test::defaultModel();
  const GaitConfig c;
  const int perPeriod = 100;
  const double dt = 1.0 / (c.freq * perPeriod);
  GaitState s;
  std::vector<JointPose> out;
  for (int k = 0; k < 6 * perPeriod; ++k) {
    const GaitOutput o = gaitTick(s, {0.8, 0.3, -0.2, true}, {}, m, c, dt);
    out.push_back(o.targets);
    s = o.state;
  }
  double worst = 0.0;
  for (int k = 3 * perPeriod; k < 5 * perPeriod; ++k)
    for (int j = 0; j < kNumJoints; ++j)
      worst = std::max(worst, std::abs(out[static_cast<std::size_t>(k + perPeriod)][j] - out[static_cast<std::size_t>(k)][j]));
  EXPECT_LE(worst, 1e-6);
}

TEST(GaitTick, MirrorSymmetry) {
  const RobotModel& m = test::defaultModel();
  const GaitConfig c;
  GaitState a, b;
  b.phase = kPi;
  std::mt19937_64 rng(43);
  std::normal_distribution<double> n(0.0, 0.05);
  for (int k = 0; k < 600; ++k) {
    const double pitch = n(rng), roll = n(rng);
    const GaitOutput oa = gaitTick(a, {0.5, 0.4, 0.3, true}, {0, pitch, roll, 1}, m, c, 0.01);
    const GaitOutput ob = gaitTick(b, {0.5, -0.4, -0.3, true}, {0, pitch, -roll, 1}, m, c, 0.01);
    const JointPose mb = mirrored(ob.targets);
    for (int j = 0; j < kNumJoints; ++j) ASSERT_NEAR(oa.targets[j], mb[j], 1e-9) << "tick " << k << " joint " << j;
    a = oa.state;
    b = ob.state;
  }
}

TEST(GaitTick, TargetsWithinLimits) {
  const RobotModel& m = test::defaultModel();
  const GaitConfig c;
  GaitState s;
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 5000; ++k) {
    if (k % 50 == 0) s.commandSmoothed = {};
    const GaitOutput o = gaitTick(s, {u(rng), u(rng), u(rng), k % 400 < 350}, {0, 0.4 * u(rng), 0.4 * u(rng), 1}, m, c, 0.01);
    ASSERT_TRUE(m.withinLimits(o.targets));
    s = o.state;
  }
}

TEST(GaitTick, PureTransition) {
  const RobotModel& m = test::defaultModel();
  const GaitConfig c;
  GaitState s;
  s.phase = 0.4;
  const GaitOutput a = gaitTick(s, {0.3, 0, 0, true}, {0, 0.05, 0.02, 1}, m, c, 0.01);
  const GaitOutput b = gaitTick(s, {0.3, 0, 0, true}, {0, 0.05, 0.02, 1}, m, c, 0.01);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_EQ(a.state.phase, b.state.phase);
  EXPECT_THROW(gaitTick(s, {}, {}, m, c, 0.0), InvalidArgument);
}

TEST(GaitConfig, JsonRoundTrip) {
  const GaitConfig c = GaitConfig::load(test::dataDir() / "gait" / "default.json");
  EXPECT_EQ(canonicalDump(GaitConfig::fromJson(c.toJson()).toJson()), canonicalDump(c.toJson()));
  Json bad = c.toJson();
  bad["freq"] = -1.0;
  EXPECT_THROW(GaitConfig::fromJson(bad), SchemaError);
}
