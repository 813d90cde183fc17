#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <vector>

#include "hop/json_io.hpp"
#include "hop/robot_model.hpp"

namespace hop {

inline constexpr int kTicksPerRev = 4096;
inline constexpr int kMaxTick = kTicksPerRev - 1;

struct JointCalibration {
  int tickOffset = 2048;
  int direction = 1;
  double stiffness = 20.0;  // N*m/rad
  double maxOffset = 0.2;   // rad
};

struct ServoCalibration {
  std::array<JointCalibration, kNumJoints> joints{};

  static ServoCalibration defaults();
  static ServoCalibration fromJson(const Json& doc);
  static ServoCalibration load(const std::filesystem::path& path);
  Json toJson() const;
  const JointCalibration& operator[](int j) const { return joints[static_cast<std::size_t>(j)]; }
};

struct TickResult {
  int ticks = 0;
  bool clamped = false;
};

TickResult angleToTicks(double angle, const JointCalibration& cal);
double ticksToAngle(int ticks, const JointCalibration& cal);

std::array<double, kNumJoints> feedforwardOffsets(const std::array<double, kNumJoints>& torques, const ServoCalibration& cal);

struct ServoTarget {
  int targetTicks = 2048;
  double effort = 1.0;
};

struct ServoCommand {
  std::array<ServoTarget, kNumJoints> joints{};
  std::vector<int> clampedJoints;
};

ServoCommand packageCommands(const JointPose& targets, const std::array<double, kNumJoints>& offsets,
                             const std::array<double, kNumJoints>& efforts, const ServoCalibration& cal);

// CSV command log: t,joint,target_ticks,offset_rad,effort
void writeCommandLogHeader(std::ostream& out);
void appendCommandLog(std::ostream& out, double t, const ServoCommand& cmd, const std::array<double, kNumJoints>& offsets);

}  // namespace hop
