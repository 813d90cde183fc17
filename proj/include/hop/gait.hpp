#pragma once

#include <filesystem>

#include "hop/json_io.hpp"
#include "hop/orientation.hpp"
#include "hop/robot_model.hpp"

namespace hop {

struct GaitCommand {
  double vx = 0.0, vy = 0.0, wz = 0.0;  // normalized to [-1, 1]
  bool walk = false;

  GaitCommand clamped() const;
  bool operator==(const GaitCommand&) const = default;
};

struct ChannelGains {
  double p = 0.0;
  double d = 0.0;
  double sat = 0.0;  // bound on |output|
};

struct GaitConfig {
  double freq = 1.4;            // Hz
  double haltExtension = 0.05;  // leg retraction of the halt pose
  double armExtension = 0.1;
  double aSag = 0.12;   // rad
  double aLat = 0.06;   // rad
  double aRot = 0.10;   // rad
  double aStep = 0.08;  // extension units
  double aSway = 0.04;  // rad
  double aArm = 0.15;   // rad

  // Sagittal channels react to fused pitch, lateral ones to fused roll.
  ChannelGains arm{-0.6, -0.05, 0.25};
  ChannelGains hipY{0.5, 0.04, 0.15};
  ChannelGains footY{0.3, 0.02, 0.12};
  ChannelGains hipX{0.4, 0.03, 0.12};
  ChannelGains footX{0.3, 0.02, 0.10};
  ChannelGains footHeight{0.15, 0.0, 0.03};  // m per rad
  ChannelGains timing{8.0, 0.0, 4.0};        // rad/s per rad

  double expectedPitch = 0.0;
  double expectedRoll = 0.0;
  double deadband = 0.5 * kPi / 180.0;
  double slewRate = 2.0;               // command units per second
  double derivativeTimeConstant = 0.05;  // s
  bool feedbackEnabled = true;

  void validate() const;
  Json toJson() const;
  static GaitConfig fromJson(const Json& doc);
  static GaitConfig load(const std::filesystem::path& path);
};

struct CorrectiveActions {
  double armAngleY = 0.0;
  double hipAngleY = 0.0, hipAngleX = 0.0;
  double footAngleY = 0.0, footAngleX = 0.0;
  double footHeight = 0.0;    // m; > 0 lifts the left sole, < 0 the right
  double timingAdjust = 0.0;  // rad/s, never positive
  bool operator==(const CorrectiveActions&) const = default;
};

struct TiltPair {
  double pitch = 0.0, roll = 0.0;
};

struct GaitState {
  double phase = 0.0;
  GaitCommand commandSmoothed;
  TiltPair prevDeviation;
  TiltPair deviationRate;
  bool hasPrevDeviation = false;
  Side lastSupportLeg = Side::Left;
  bool correctionLimited = false;  // foot height correction was reduced to stay reachable
  bool jointsClamped = false;
  CorrectiveActions lastActions;
};

struct GaitOutput {
  GaitState state;
  JointPose targets;
  AbstractPose abstractPose;
};

double phaseAdvance(double phase, double freq, double dt, double timingAdjust);

AbstractPose openLoopWaveform(double phase, const GaitCommand& cmd, const GaitConfig& config);

// `deviation` is measured fused pitch/roll minus the configured expectation.
CorrectiveActions feedbackCorrections(const TiltPair& deviation, const TiltPair& deviationRate, double phase,
                                      const GaitConfig& config);

void applyAbstractCorrections(AbstractPose& pose, const CorrectiveActions& actions);

AbstractPose haltPose(const GaitConfig& config);

GaitOutput gaitTick(const GaitState& state, const GaitCommand& cmd, const FusedAngles& fused, const RobotModel& model,
                    const GaitConfig& config, double dt);

}  // namespace hop
