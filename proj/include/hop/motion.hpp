#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hop/json_io.hpp"
#include "hop/orientation.hpp"
#include "hop/robot_model.hpp"

namespace hop {

using JointArray = std::array<double, kNumJoints>;

struct SupportCoefficients {
  double left = 0.0, right = 0.0;
  bool operator==(const SupportCoefficients&) const = default;
};

struct Keyframe {
  double time = 0.0;
  JointArray positions{};
  JointArray velocities{};
  JointArray efforts{};
  SupportCoefficients support;
  bool operator==(const Keyframe&) const = default;
};

struct PidGains {
  double p = 0.0, i = 0.0, d = 0.0;
  bool operator==(const PidGains&) const = default;
};

struct MotionPid {
  bool pitchEnabled = false, rollEnabled = false;
  PidGains pitch, roll;
  double integralLimit = 0.1;  // rad, bound on the integral contribution
  JointArray pitchMap{};       // weights in [-1, 1]
  JointArray rollMap{};
  bool operator==(const MotionPid&) const = default;
};

struct Motion {
  std::string name;
  std::vector<Keyframe> keyframes;
  MotionPid pid;

  double duration() const { return keyframes.empty() ? 0.0 : keyframes.back().time; }
  bool operator==(const Motion&) const = default;
};

struct MotionFrame {
  JointArray positions{};
  JointArray velocities{};
  JointArray efforts{};
  SupportCoefficients support;
};

void validateMotion(const Motion& motion);
Motion motionFromJson(const Json& doc);
Json motionToJson(const Motion& motion);
Motion loadMotion(const std::filesystem::path& path);
// Canonical bytes of the motion document (sorted keys, 9 significant digits).
std::string saveMotion(const Motion& motion);

// Cubic Hermite through (position, velocity) knots; efforts and support are
// linear. `t` within 1e-6 of the ends is clamped, anything further throws.
MotionFrame interpolate(const Motion& motion, double t);

struct PlayState {
  double time = 0.0;
  double pitchIntegral = 0.0, rollIntegral = 0.0;
  double prevPitch = 0.0, prevRoll = 0.0;
  bool hasPrev = false;
  bool finished = false;
};

struct PlayOutput {
  PlayState state;
  MotionFrame frame;  // positions include the orientation feedback
  double pitchCorrection = 0.0, rollCorrection = 0.0;
  bool completed = false;
};

PlayOutput playTick(const Motion& motion, const PlayState& state, const FusedAngles& fused, double dt);

}  // namespace hop
