#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hop/gait.hpp"
#include "hop/json_io.hpp"
#include "hop/motion.hpp"
#include "hop/orientation.hpp"
#include "hop/robot_model.hpp"
#include "hop/servo.hpp"
#include "hop/state_estimator.hpp"

namespace hop {

// Recorded in every log sidecar so runs can be reproduced elsewhere.
inline constexpr std::string_view kNoiseGenerator = "mt19937_64+box-muller";
inline constexpr double kServoTimeConstant = 0.06;  // s at effort 1

// Standard normal deviates from mt19937_64 via the Box-Muller transform.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed = 0) : m_engine(seed) {}
  double next();

 private:
  std::mt19937_64 m_engine;
  double m_spare = 0.0;
  bool m_hasSpare = false;
};

struct ImuNoiseConfig {
  double gyroDensity = 5e-4;  // rad/s/sqrt(Hz)
  Vec3 gyroBias{0.01, -0.005, 0.008};  // rad/s
  double accel = 0.05;        // m/s^2, per-sample standard deviation
  double mag = 0.02;          // per-sample standard deviation

  static ImuNoiseConfig none();
  void validate() const;
  static ImuNoiseConfig fromJson(const Json& doc, const std::string& path);
};

// Raised-cosine tilt bump added to the scripted truth.
struct Disturbance {
  double start = 0.0, duration = 0.2;  // s
  double pitch = 0.0, roll = 0.0;      // rad, peak
};

// Scripted trunk attitude in fused angles.
struct TruthScript {
  FusedAngles initial;
  double swayPitch = 0.0, swayRoll = 0.0;  // rad amplitudes
  double swayFreq = 0.0;                   // Hz
  double yawRate = 0.0;                    // rad/s
  std::vector<Disturbance> disturbances;

  FusedAngles at(double t) const;
  RotationQuat attitude(double t) const { return quatFromFused(at(t)); }
  Vec3 bodyRate(double t) const;  // rad/s in the trunk frame
  static TruthScript fromJson(const Json& doc, const std::string& path);
};

struct SimState {
  std::array<double, kNumJoints> q{};
  std::array<double, kNumJoints> qd{};
  RotationQuat attitude;
  Vec3 angularRate = Vec3::Zero();
  double time = 0.0;
  std::uint64_t seed = 0;
  GaussianSource noise;
};

SimState simInit(const TruthScript& truth, std::uint64_t seed, const std::array<double, kNumJoints>& q0 = {});

// Joints follow an exact first-order lag toward the commanded ticks with time
// constant kServoTimeConstant / effort; effort 0 holds the current angle.
SimState simStep(const SimState& state, const ServoCommand& cmd, const ServoCalibration& cal, double dt,
                 const TruthScript& truth);

// Noise sigma per sample: gyro density / sqrt(dt), the others as given.
ImuSample synthesizeImu(SimState& state, const ImuNoiseConfig& noise, double dt);

struct Scenario {
  enum class Controller { Gait, Motion };
  Controller controller = Controller::Gait;
  double duration = 10.0;  // s
  double rate = 100.0;     // Hz
  std::uint64_t seed = 1;
  ImuNoiseConfig noise;
  TruthScript truth;
  std::optional<FusedAngles> estimatorInitial;  // identity when absent
  GaitCommand command{0.0, 0.0, 0.0, true};
  std::filesystem::path motionPath;
  std::optional<Motion> motion;
  bool feedforward = true;

  static Scenario fromJson(const Json& doc, const std::filesystem::path& baseDir);
  static Scenario load(const std::filesystem::path& path);
};

struct SimResources {
  RobotModel model;
  GaitConfig gait;
  ServoCalibration servo;
  FilterConfig filter;
};

struct RunSummary {
  long ticks = 0;
  bool motionCompleted = false;
  double rmsTiltError = 0.0;  // rad, estimate vs truth over pitch and roll
  double finalTiltError = 0.0;
};

std::string logHeader();

// Runs the closed loop and hands each CSV line (header first, '\n'
// terminated) to `sink`. Controller failures raise ScenarioError.
RunSummary runScenario(const Scenario& scenario, const SimResources& res,
                       const std::function<void(std::string_view)>& sink);

// Convenience wrapper collecting the log in memory.
std::string runScenarioLog(const Scenario& scenario, const SimResources& res, RunSummary* summary = nullptr);

Json logMetadata(const Scenario& scenario);

}  // namespace hop
