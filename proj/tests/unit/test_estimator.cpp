#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hop/errors.hpp"
#include "hop/sim.hpp"
#include "hop/state_estimator.hpp"
#include "test_support.hpp"

using namespace hop;

namespace {

ImuSample stationary() {
  ImuSample s;
  s.accel = Vec3(0, 0, kGravity);
  s.mag = Vec3(1, 0, 0);
  return s;
}

}  // namespace

TEST(FilterInit, Defaults) {
  const FilterState s = filterInit(FilterConfig{});
  EXPECT_TRUE(s.attitude.isApprox(RotationQuat::identity(), 0.0));
  EXPECT_EQ(s.gyroBias, Vec3::Zero());
  EXPECT_EQ(s.headingBias, 0.0);
}

TEST(FilterInit, RejectsNegativeGain) {
  FilterConfig c;
  c.kp = -1;
  EXPECT_THROW(filterInit(c), InvalidArgument);
}

TEST(FilterConfig, JsonRoundTrip) {
  FilterConfig c;
  c.kp = 1.7;
  c.ti = 3.25;
  c.km = 0.05;
  c.magOffset = Vec3(0.1, -0.2, 0.3);
  c.magMatrix(0, 1) = 0.02;
  const FilterConfig d = FilterConfig::fromJson(parseJson(canonicalDump(c.toJson())));
  EXPECT_EQ(canonicalDump(d.toJson()), canonicalDump(c.toJson()));
  EXPECT_EQ(d.kp, 1.7);
  EXPECT_EQ(d.magOffset, c.magOffset);
}

TEST(FilterUpdate, RejectsBadDt) {
  const FilterState s = filterInit(FilterConfig{});
  EXPECT_THROW(filterUpdate(s, stationary(), 0.0), InvalidArgument);
  EXPECT_THROW(filterUpdate(s, stationary(), -0.01), InvalidArgument);
  EXPECT_THROW(filterUpdate(s, stationary(), 0.2), InvalidArgument);
}

TEST(FilterUpdate, StationaryFixedPoint) {
  FilterState s = filterInit(FilterConfig{});
  for (int i = 0; i < 1000; ++i) s = filterUpdate(s, stationary(), 0.01);
  EXPECT_TRUE(s.attitude.isApprox(RotationQuat::identity(), 1e-6));
}

TEST(FilterUpdate, ZeroAccelIsPureGyro) {
  FilterConfig c;
  c.km = 0.0;
  ImuSample s;
  s.gyro = Vec3(0.1, 0.2, -0.3);
  const FilterState a = filterUpdate(filterInit(c), s, 0.01);
  c.kp = 0.0;
  const FilterState b = filterUpdate(filterInit(c), s, 0.01);
  EXPECT_TRUE(a.attitude.isApprox(b.attitude, 1e-15));
}

TEST(FilterUpdate, ConvergesFromTiltedStart) {
  FilterState s = filterInit(FilterConfig{}, quatFromAxisAngle(Vec3::UnitY(), 20.0 * kPi / 180.0));
  double t = 0.0;
  while (t < 3.0) {
    s = filterUpdate(s, stationary(), 0.01);
    t += 0.01;
  }
  const FusedAngles f = estimateFused(s);
  EXPECT_LT(std::abs(f.pitch), 0.5 * kPi / 180.0);
  EXPECT_LT(std::abs(f.roll), 0.5 * kPi / 180.0);
}

TEST(FilterUpdate, GyroOnlyYawDrift) {
  FilterConfig c;
  c.km = 0.0;
  FilterState s = filterInit(c);
  ImuSample in = stationary();
  in.gyro = Vec3(0, 0, 0.5);
  double unwrapped = 0.0, last = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    s = filterUpdate(s, in, 0.01);
    const double yaw = estimateFused(s).yaw;
    unwrapped += wrapAngle(yaw - last);
    last = yaw;
    const double expected = 0.5 * 0.01 * k;
    if (k % 100 == 0) ASSERT_NEAR(unwrapped, expected, 0.01 * expected);
  }
}

TEST(FilterUpdate, PureGyroMatchesClosedForm) {
  FilterConfig c;
  c.kp = 0.0;
  c.km = 0.0;
  FilterState s = filterInit(c);
  ImuSample in = stationary();
  in.gyro = Vec3(0.3, -0.2, 0.7);
  const double dt = 0.01;
  const RotationQuat step = quatFromAxisAngle(in.gyro.normalized(), in.gyro.norm() * dt);
  RotationQuat expected;
  for (int k = 0; k < 500; ++k) {
    const FilterState one = filterUpdate(s, in, dt);
    ASSERT_LE(test::rotationAngleBetween(one.attitude.toMatrix(), (s.attitude * step).toMatrix()), 1e-6);
    s = filterUpdate(s, in, dt);
    expected = expected * step;
    ASSERT_LE(test::rotationAngleBetween(s.attitude.toMatrix(), expected.toMatrix()), 1e-6 * (k + 1));
  }
}

TEST(FilterUpdate, MagnetometerOnlyAffectsYaw) {
  FilterConfig withMag, noMag;
  withMag.km = 0.5;
  noMag.km = 0.0;
  FilterState a = filterInit(withMag, quatFromFused({0.4, 0.1, -0.05, 1}));
  FilterState b = filterInit(noMag, a.attitude);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (int k = 0; k < 2000; ++k) {
    ImuSample s;
    s.gyro = Vec3(0.05 * n(rng), 0.05 * n(rng), 0.05 * n(rng));
    s.accel = Vec3(0.2 * n(rng), 0.2 * n(rng), kGravity + 0.2 * n(rng));
    s.mag = Vec3(1 + 0.05 * n(rng), 0.3 + 0.05 * n(rng), 0.05 * n(rng));
    a = filterUpdate(a, s, 0.01);
    b = filterUpdate(b, s, 0.01);
    const FusedAngles fa = estimateFused(a), fb = estimateFused(b);
    ASSERT_NEAR(fa.pitch, fb.pitch, 1e-9);
    ASSERT_NEAR(fa.roll, fb.roll, 1e-9);
  }
  EXPECT_GT(std::abs(wrapAngle(estimateFused(a).yaw - estimateFused(b).yaw)), 1e-3);
}

TEST(FilterUpdate, UnitNormOverManyUpdates) {
  FilterState s = filterInit(FilterConfig{});
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000000; ++k) {
    ImuSample in;
    in.gyro = Vec3(n(rng), n(rng), n(rng));
    in.accel = Vec3(n(rng), n(rng), kGravity + n(rng));
    in.mag = Vec3(1 + 0.1 * n(rng), 0.1 * n(rng), 0.1 * n(rng));
    s = filterUpdate(s, in, 0.005);
    if (k % 997 == 0) {
      const RotationQuat& q = s.attitude;
      ASSERT_NEAR(q.w() * q.w() + q.x() * q.x() + q.y() * q.y() + q.z() * q.z(), 1.0, 1e-9);
    }
  }
}

TEST(FilterUpdate, Deterministic) {
  const auto run = [] {
    FilterState s = filterInit(FilterConfig{}, quatFromAxisAngle(Vec3::UnitX(), 0.2));
    GaussianSource g(42);
    std::vector<double> trace;
    for (int k = 0; k < 500; ++k) {
      ImuSample in = stationary();
      in.gyro = Vec3(g.next(), g.next(), g.next()) * 0.01;
      s = filterUpdate(s, in, 0.01);
      trace.insert(trace.end(), {s.attitude.w(), s.attitude.x(), s.attitude.y(), s.attitude.z(), s.gyroBias.x()});
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}

TEST(EstimateFused, MatchesOrientationCore) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  EXPECT_EQ(estimateFused(filterInit(FilterConfig{})).pitch, 0.0);
  EXPECT_NEAR(estimateFused(filterInit(FilterConfig{}, quatFromAxisAngle(Vec3::UnitY(), 0.2))).pitch, 0.2, 1e-12);
  for (int i = 0; i < 100; ++i) {
    const RotationQuat q(n(rng), n(rng), n(rng), n(rng));
    const FusedAngles a = estimateFused(filterInit(FilterConfig{}, q));
    const FusedAngles b = fusedFromQuat(q);
    EXPECT_EQ(a.yaw, b.yaw);
    EXPECT_EQ(a.pitch, b.pitch);
    EXPECT_EQ(a.roll, b.roll);
    EXPECT_EQ(a.hemisphere, b.hemisphere);
  }
}

TEST(ImuCsv, ParsesAndValidates) {
  const auto samples = parseImuCsv("t,gx,gy,gz,ax,ay,az,mx,my,mz\n0,0,0,0.5,0,0,9.81,1,0,0\n0.01,0,0,0.5,0,0,9.81,1,0,0\n");
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[1].timestamp, 0.01);
  EXPECT_EQ(samples[0].gyro.z(), 0.5);
  EXPECT_THROW(parseImuCsv("t,gx\n0,1\n"), SchemaError);
  EXPECT_THROW(parseImuCsv("t,gx,gy,gz,ax,ay,az,mx,my,mz\n0.1,0,0,0,0,0,9.81,1,0,0\n0.1,0,0,0,0,0,9.81,1,0,0\n"),
               SchemaError);
}
