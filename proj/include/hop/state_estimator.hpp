#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hop/json_io.hpp"
#include "hop/orientation.hpp"

namespace hop {

struct ImuSample {
  Vec3 gyro = Vec3::Zero();   // rad/s
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 mag = Vec3::Zero();    // arbitrary scale
  double timestamp = 0.0;     // s
};

struct FilterConfig {
  double kp = 2.2;        // 1/s
  double ti = 2.65;       // s
  double km = 0.2;        // 1/s, heading correction from the magnetometer
  double accelTrustBand = 4.0;  // m/s^2 around 9.81
  // Bias learning fades out linearly as the tilt error approaches this
  // angle (rad), so large transients are not integrated into the bias.
  double biasErrorBand = 5.0 * kPi / 180.0;
  // Hard/soft iron: mag_cal = magMatrix * (mag_raw - magOffset).
  Mat3 magMatrix = Mat3::Identity();
  Vec3 magOffset = Vec3::Zero();

  void validate() const;
  Json toJson() const;
  static FilterConfig fromJson(const Json& j, const std::string& path = "filter");
};

struct FilterState {
  RotationQuat attitude;
  Vec3 gyroBias = Vec3::Zero();  // body frame, rad/s
  double headingBias = 0.0;      // about global z, rad/s
  FilterConfig config;
};

inline constexpr double kGravity = 9.81;
inline constexpr double kMaxFilterDt = 0.1;

FilterState filterInit(const FilterConfig& config, std::optional<RotationQuat> initialAttitude = std::nullopt);

// One complementary filter step. Pure: the input state is not modified.
FilterState filterUpdate(const FilterState& state, const ImuSample& sample, double dt);

FusedAngles estimateFused(const FilterState& state);

// Effective gyro bias expressed in the body frame.
Vec3 gyroBiasEstimate(const FilterState& state);

// Replay CSV with header t,gx,gy,gz,ax,ay,az,mx,my,mz.
std::vector<ImuSample> readImuCsv(const std::filesystem::path& path);
std::vector<ImuSample> parseImuCsv(const std::string& text);

}  // namespace hop
