#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hop/errors.hpp"
#include "hop/servo.hpp"
#include "test_support.hpp"

using namespace hop;

TEST(Ticks, Examples) {
  const JointCalibration cal;
  EXPECT_EQ(angleToTicks(0.0, cal).ticks, 2048);
  EXPECT_EQ(angleToTicks(kPi / 2, cal).ticks, 3072);
  EXPECT_EQ(ticksToAngle(2048, cal), 0.0);
  EXPECT_DOUBLE_EQ(ticksToAngle(0, cal), -kPi);
  JointCalibration rev;
  rev.direction = -1;
  EXPECT_EQ(angleToTicks(kPi / 2, rev).ticks, 1024);
  EXPECT_DOUBLE_EQ(ticksToAngle(0, rev), kPi);
}

TEST(Ticks, ClampFlagged) {
  const JointCalibration cal;
  const TickResult hi = angleToTicks(4.0, cal);
  EXPECT_EQ(hi.ticks, kMaxTick);
  EXPECT_TRUE(hi.clamped);
  const TickResult lo = angleToTicks(-4.0, cal);
  EXPECT_EQ(lo.ticks, 0);
  EXPECT_TRUE(lo.clamped);
  EXPECT_FALSE(angleToTicks(1.0, cal).clamped);
  EXPECT_THROW(angleToTicks(NAN, cal), InvalidArgument);
}

TEST(Ticks, HalfTickQuantization) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> offset(1000, 3000);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  const double halfTick = kPi / 4096;
  for (int i = 0; i < 100000; ++i) {
    JointCalibration cal;
    cal.tickOffset = offset(rng);
    cal.direction = i % 2 ? 1 : -1;
    const double a = angle(rng);
    ASSERT_LE(std::abs(ticksToAngle(angleToTicks(a, cal).ticks, cal) - a), halfTick * (1 + 1e-12));
  }
  JointCalibration cal;
  for (int t = 0; t <= kMaxTick; ++t) ASSERT_EQ(angleToTicks(ticksToAngle(t, cal), cal).ticks, t);
}

TEST(Feedforward, Examples) {
  ServoCalibration cal = ServoCalibration::defaults();
  cal.joints[3].stiffness = 10.0;
  cal.joints[3].maxOffset = 0.5;
  std::array<double, kNumJoints> tau{};
  for (double v : feedforwardOffsets(tau, cal)) EXPECT_EQ(v, 0.0);
  tau[3] = 2.0;
  tau[4] = 1e6;
  const auto off = feedforwardOffsets(tau, cal);
  EXPECT_DOUBLE_EQ(off[3], 0.2);
  EXPECT_EQ(off[4], cal.joints[4].maxOffset);
}

TEST(Feedforward, Odd) {
  const ServoCalibration cal = ServoCalibration::load(test::dataDir() / "calibration" / "servo.json");
  std::mt19937_64 rng(73);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    std::array<double, kNumJoints> tau{}, neg{};
    for (std::size_t j = 0; j < tau.size(); ++j) {
      tau[j] = n(rng);
      neg[j] = -tau[j];
    }
    const auto a = feedforwardOffsets(tau, cal), b = feedforwardOffsets(neg, cal);
    for (std::size_t j = 0; j < tau.size(); ++j) ASSERT_EQ(a[j], -b[j]);
  }
}

TEST(PackageCommands, ZeroPose) {
  const ServoCalibration cal = ServoCalibration::defaults();
  std::array<double, kNumJoints> zero{}, ones{};
  ones.fill(1.0);
  const ServoCommand cmd = packageCommands({}, zero, ones, cal);
  for (const ServoTarget& t : cmd.joints) {
    EXPECT_EQ(t.targetTicks, 2048);
    EXPECT_EQ(t.effort, 1.0);
  }
  EXPECT_TRUE(cmd.clampedJoints.empty());
}

TEST(PackageCommands, OffsetPastLimitFlagged) {
  const ServoCalibration cal = ServoCalibration::defaults();
  JointPose q;
  q[7] = kPi - 0.01;
  std::array<double, kNumJoints> off{}, eff{};
  off[7] = 0.1;
  const ServoCommand cmd = packageCommands(q, off, eff, cal);
  EXPECT_EQ(cmd.joints[7].targetTicks, kMaxTick);
  ASSERT_EQ(cmd.clampedJoints.size(), 1u);
  EXPECT_EQ(cmd.clampedJoints[0], 7);
}

TEST(PackageCommands, ComponentwiseOracle) {
  const ServoCalibration cal = ServoCalibration::load(test::dataDir() / "calibration" / "servo.json");
  std::mt19937_64 rng(79);
  std::normal_distribution<double> n(0.0, 2.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    JointPose q;
    std::array<double, kNumJoints> off{}, eff{};
    for (int j = 0; j < kNumJoints; ++j) {
      q[j] = n(rng);
      off[static_cast<std::size_t>(j)] = 0.1 * n(rng);
      eff[static_cast<std::size_t>(j)] = u(rng);
    }
    const ServoCommand cmd = packageCommands(q, off, eff, cal);
    for (int j = 0; j < kNumJoints; ++j) {
      const auto& c = cal[j];
      const double raw = std::round(c.tickOffset + c.direction * (q[j] + off[static_cast<std::size_t>(j)]) * 4096 / (2 * kPi));
      const int expected = static_cast<int>(std::min(4095.0, std::max(0.0, raw)));
      ASSERT_EQ(cmd.joints[static_cast<std::size_t>(j)].targetTicks, expected);
      ASSERT_GE(cmd.joints[static_cast<std::size_t>(j)].targetTicks, 0);
      ASSERT_LE(cmd.joints[static_cast<std::size_t>(j)].targetTicks, 4095);
      ASSERT_EQ(cmd.joints[static_cast<std::size_t>(j)].effort, eff[static_cast<std::size_t>(j)]);
    }
  }
}

TEST(ServoCalibration, JsonRoundTripAndErrors) {
  const ServoCalibration cal = ServoCalibration::load(test::dataDir() / "calibration" / "servo.json");
  EXPECT_EQ(canonicalDump(ServoCalibration::fromJson(cal.toJson()).toJson()), canonicalDump(cal.toJson()));
  Json bad = cal.toJson();
  bad["joints"][2]["direction"] = 0;
  EXPECT_THROW(ServoCalibration::fromJson(bad), SchemaError);
}

TEST(CommandLog, Format) {
  std::ostringstream out;
  writeCommandLogHeader(out);
  ServoCommand cmd;
  std::array<double, kNumJoints> off{};
  off[0] = 0.25;
  appendCommandLog(out, 0.5, cmd, off);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "t,joint,target_ticks,offset_rad,effort");
  EXPECT_NE(s.find("0.5,neck_yaw,2048,0.25,1\n"), std::string::npos);
}
