#include "hop/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hop/errors.hpp"

namespace hop {

double GaussianSource::next() {
  if (m_hasSpare) {
    m_hasSpare = false;
    return m_spare;
  }
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = 1.0 - static_cast<double>(m_engine() >> 11) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(m_engine() >> 11) * kScale;        // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  m_spare = r * std::sin(2.0 * kPi * u2);
  m_hasSpare = true;
  return r * std::cos(2.0 * kPi * u2);
}

ImuNoiseConfig ImuNoiseConfig::none() {
  ImuNoiseConfig n;
  n.gyroDensity = 0.0;
  n.gyroBias = Vec3::Zero();
  n.accel = 0.0;
  n.mag = 0.0;
  return n;
}

void ImuNoiseConfig::validate() const {
  if (!(gyroDensity >= 0.0) || !(accel >= 0.0) || !(mag >= 0.0)) throw InvalidArgument("noise levels must be >= 0");
  if (!gyroBias.allFinite()) throw InvalidArgument("gyro bias must be finite");
}

ImuNoiseConfig ImuNoiseConfig::fromJson(const Json& doc, const std::string& path) {
  schema::onlyKeys(doc, {"gyro_density", "gyro_bias", "accel", "mag"}, path);
  ImuNoiseConfig n;
  n.gyroDensity = schema::numberOr(doc, "gyro_density", n.gyroDensity, path);
  if (doc.contains("gyro_bias")) n.gyroBias = schema::vec3(doc, "gyro_bias", path);
  n.accel = schema::numberOr(doc, "accel", n.accel, path);
  n.mag = schema::numberOr(doc, "mag", n.mag, path);
  try {
    n.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
  return n;
}

FusedAngles TruthScript::at(double t) const {
  FusedAngles f = initial;
  const double w = 2.0 * kPi * swayFreq * t;
  f.yaw = wrapAngle(initial.yaw + yawRate * t);
  f.pitch += swayPitch * std::sin(w);
  f.roll += swayRoll * std::cos(w);
  for (const Disturbance& d : disturbances) {
    if (t <= d.start || t >= d.start + d.duration) continue;
    const double s = 0.5 * (1.0 - std::cos(2.0 * kPi * (t - d.start) / d.duration));
    f.pitch += d.pitch * s;
    f.roll += d.roll * s;
  }
  f.pitch = std::clamp(f.pitch, -1.2, 1.2);
  f.roll = std::clamp(f.roll, -1.2, 1.2);
  const double s2 = std::sin(f.pitch) * std::sin(f.pitch) + std::sin(f.roll) * std::sin(f.roll);
  if (s2 > 1.0) throw InvalidArgument("scripted tilt exceeds the fused angle domain");
  return f;
}

Vec3 TruthScript::bodyRate(double t) const {
  constexpr double h = 1e-6;
  const Eigen::Quaterniond q = attitude(t).toEigen();
  Eigen::Quaterniond qa = attitude(t + h).toEigen();
  Eigen::Quaterniond qb = attitude(std::max(0.0, t - h)).toEigen();
  if (qa.dot(q) < 0) qa.coeffs() = -qa.coeffs();
  if (qb.dot(q) < 0) qb.coeffs() = -qb.coeffs();
  const double span = (t + h) - std::max(0.0, t - h);
  Eigen::Quaterniond dq;
  dq.coeffs() = (qa.coeffs() - qb.coeffs()) / span;
  // q_dot = 0.5 q * (0, omega_body)
  const Eigen::Quaterniond w = q.conjugate() * dq;
  return 2.0 * w.vec();
}

TruthScript TruthScript::fromJson(const Json& doc, const std::string& path) {
  schema::onlyKeys(doc, {"initial", "sway_pitch", "sway_roll", "sway_freq", "yaw_rate", "disturbances"}, path);
  TruthScript s;
  if (doc.contains("initial")) {
    const auto v = schema::numbers(doc, "initial", 3, path);
    s.initial = {v[0], v[1], v[2], 1};
    if (!s.initial.valid()) throw SchemaError(path + ".initial", "invalid fused angles");
  }
  s.swayPitch = schema::numberOr(doc, "sway_pitch", 0.0, path);
  s.swayRoll = schema::numberOr(doc, "sway_roll", 0.0, path);
  s.swayFreq = schema::numberOr(doc, "sway_freq", 0.0, path);
  s.yawRate = schema::numberOr(doc, "yaw_rate", 0.0, path);
  if (doc.contains("disturbances")) {
    const Json& arr = doc["disturbances"];
    if (!arr.is_array()) throw SchemaError(path + ".disturbances", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".disturbances[" + std::to_string(i) + "]";
      schema::onlyKeys(arr[i], {"t", "duration", "pitch", "roll"}, p);
      Disturbance d;
      d.start = schema::number(arr[i], "t", p);
      d.duration = schema::number(arr[i], "duration", p);
      if (!(d.duration > 0.0)) throw SchemaError(p + ".duration", "must be > 0");
      d.pitch = schema::numberOr(arr[i], "pitch", 0.0, p);
      d.roll = schema::numberOr(arr[i], "roll", 0.0, p);
      s.disturbances.push_back(d);
    }
  }
  return s;
}

SimState simInit(const TruthScript& truth, std::uint64_t seed, const std::array<double, kNumJoints>& q0) {
  SimState s;
  s.q = q0;
  s.seed = seed;
  s.noise = GaussianSource(seed);
  s.attitude = truth.attitude(0.0);
  s.angularRate = truth.bodyRate(0.0);
  return s;
}

SimState simStep(const SimState& state, const ServoCommand& cmd, const ServoCalibration& cal, double dt,
                 const TruthScript& truth) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  SimState next = state;
  for (int j = 0; j < kNumJoints; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const ServoTarget& target = cmd.joints[u];
    if (!(target.effort > 0.0)) {
      next.qd[u] = 0.0;
      continue;
    }
    const double goal = ticksToAngle(target.targetTicks, cal[j]);
    const double tau = kServoTimeConstant / std::min(target.effort, 1.0);
    const double q = goal + (state.q[u] - goal) * std::exp(-dt / tau);
    next.qd[u] = (q - state.q[u]) / dt;
    next.q[u] = q;
  }
  next.time = state.time + dt;
  next.attitude = truth.attitude(next.time);
  next.angularRate = truth.bodyRate(next.time);
  return next;
}

ImuSample synthesizeImu(SimState& state, const ImuNoiseConfig& noise, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const auto gauss3 = [&](double sigma) {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = state.noise.next();
    return Vec3(sigma * v);
  };
  const Mat3 rt = state.attitude.toMatrix().transpose();
  ImuSample s;
  s.timestamp = state.time;
  s.gyro = state.angularRate + noise.gyroBias + gauss3(noise.gyroDensity / std::sqrt(dt));
  s.accel = rt * Vec3(0, 0, kGravity) + gauss3(noise.accel);
  s.mag = rt * Vec3(1, 0, 0) + gauss3(noise.mag);
  return s;
}

Scenario Scenario::fromJson(const Json& doc, const std::filesystem::path& baseDir) {
  schema::onlyKeys(doc, {"schema_version", "notes", "controller", "duration", "rate", "seed", "noise", "truth",
                         "estimator_initial", "command", "motion", "feedforward"},
                   "");
  if (doc.contains("schema_version") && schema::integer(doc, "schema_version", "") != 1)
    throw SchemaError("schema_version", "unsupported version");
  Scenario s;
  const std::string controller = schema::string(doc, "controller", "");
  if (controller == "gait") s.controller = Controller::Gait;
  else if (controller == "motion") s.controller = Controller::Motion;
  else throw SchemaError("controller", "expected \"gait\" or \"motion\"");

  s.rate = schema::numberOr(doc, "rate", s.rate, "");
  if (!(s.rate >= 10.0 && s.rate <= 1000.0)) throw SchemaError("rate", "must lie in [10, 1000] Hz");
  if (doc.contains("seed")) {
    const Json& seed = doc["seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
      throw SchemaError("seed", "expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("noise")) s.noise = ImuNoiseConfig::fromJson(doc["noise"], "noise");
  if (doc.contains("truth")) s.truth = TruthScript::fromJson(doc["truth"], "truth");
  if (doc.contains("estimator_initial")) {
    const auto v = schema::numbers(doc, "estimator_initial", 3, "");
    s.estimatorInitial = FusedAngles{v[0], v[1], v[2], 1};
    if (!s.estimatorInitial->valid()) throw SchemaError("estimator_initial", "invalid fused angles");
  }
  if (doc.contains("command")) {
    const Json& c = doc["command"];
    schema::onlyKeys(c, {"vx", "vy", "wz", "walk"}, "command");
    s.command.vx = schema::numberOr(c, "vx", 0.0, "command");
    s.command.vy = schema::numberOr(c, "vy", 0.0, "command");
    s.command.wz = schema::numberOr(c, "wz", 0.0, "command");
    if (c.contains("walk")) {
      if (!c["walk"].is_boolean()) throw SchemaError("command.walk", "expected a boolean");
      s.command.walk = c["walk"].get<bool>();
    }
  }
  if (doc.contains("feedforward")) {
    if (!doc["feedforward"].is_boolean()) throw SchemaError("feedforward", "expected a boolean");
    s.feedforward = doc["feedforward"].get<bool>();
  }
  if (s.controller == Controller::Motion) {
    s.motionPath = baseDir / schema::string(doc, "motion", "");
    try {
      s.motion = loadMotion(s.motionPath);
    } catch (const SchemaError& e) {
      throw SchemaError("motion", s.motionPath.string() + ": " + e.what());
    }
  }
  if (doc.contains("duration")) s.duration = schema::number(doc, "duration", "");
  else if (s.motion) s.duration = s.motion->duration() + 0.5;
  if (!(s.duration > 0.0) || s.duration > 3600.0) throw SchemaError("duration", "must lie in (0, 3600] s");
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  return fromJson(readJsonFile(path), path.parent_path());
}

std::string logHeader() {
  std::string h = "t,truth_pitch,truth_roll,est_pitch,est_roll,phase";
  for (const auto name : jointNames()) h += ",target_" + std::string(name);
  for (const auto name : jointNames()) h += ",actual_" + std::string(name);
  return h;
}

RunSummary runScenario(const Scenario& sc, const SimResources& res, const std::function<void(std::string_view)>& sink) {
  const double dt = 1.0 / sc.rate;
  const long ticks = std::lround(sc.duration * sc.rate);

  sink(logHeader() + "\n");

  FilterState filter = filterInit(res.filter, sc.estimatorInitial ? std::optional(quatFromFused(*sc.estimatorInitial))
                                                                    : std::nullopt);
  GaitState gait;
  PlayState play;

  // Start the joints at the first commanded pose so the run has no startup jump.
  JointPose startPose;
  if (sc.controller == Scenario::Controller::Gait) {
    startPose = abstractToJoint(sc.command.walk ? openLoopWaveform(0.0, {}, res.gait) : haltPose(res.gait), res.model);
  } else {
    const MotionFrame f = interpolate(*sc.motion, 0.0);
    std::copy(f.positions.begin(), f.positions.end(), startPose.q.begin());
  }
  startPose = res.model.clampToLimits(startPose, nullptr);
  SimState sim = simInit(sc.truth, sc.seed, startPose.q);

  JointPose prevTarget = startPose, prevPrevTarget = startPose;
  RunSummary summary;
  double sqErr = 0.0;
  std::string line;

  for (long k = 0; k < ticks; ++k) {
    const ImuSample imu = synthesizeImu(sim, sc.noise, dt);
    filter = filterUpdate(filter, imu, dt);
    const FusedAngles est = estimateFused(filter);
    const FusedAngles truth = fusedFromQuat(sim.attitude);

    JointPose targets;
    std::array<double, kNumJoints> efforts;
    efforts.fill(1.0);
    double phase = 0.0;
    try {
      if (sc.controller == Scenario::Controller::Gait) {
        const GaitOutput out = gaitTick(gait, sc.command, est, res.model, res.gait, dt);
        gait = out.state;
        targets = out.targets;
        phase = gait.phase;
      } else {
        const PlayOutput out = playTick(*sc.motion, play, est, dt);
        play = out.state;
        std::copy(out.frame.positions.begin(), out.frame.positions.end(), targets.q.begin());
        targets = res.model.clampToLimits(targets, nullptr);
        efforts = out.frame.efforts;
        phase = std::min(out.state.time, sc.motion->duration());
        summary.motionCompleted = summary.motionCompleted || out.completed;
      }
    } catch (const std::exception& e) {
      throw ScenarioError(std::string("controller failed: ") + e.what(), k);
    }

    std::array<double, kNumJoints> offsets{};
    if (sc.feedforward) {
      JointPose qd, qdd;
      for (std::size_t j = 0; j < kNumJoints; ++j) {
        qd.q[j] = (targets.q[j] - prevTarget.q[j]) / dt;
        qdd.q[j] = (targets.q[j] - 2.0 * prevTarget.q[j] + prevPrevTarget.q[j]) / (dt * dt);
      }
      const Vec3 gravity = filter.attitude.inverse().rotate(Vec3(0, 0, -kGravity));
      offsets = feedforwardOffsets(inverseDynamics(res.model, targets, qd, qdd, gravity), res.servo);
    }
    prevPrevTarget = prevTarget;
    prevTarget = targets;
    const ServoCommand cmd = packageCommands(targets, offsets, efforts, res.servo);

    const double ep = est.pitch - truth.pitch, er = est.roll - truth.roll;
    sqErr += ep * ep + er * er;
    summary.finalTiltError = std::sqrt(ep * ep + er * er);

    line.clear();
    line += formatNumber(sim.time);
    for (double v : {truth.pitch, truth.roll, est.pitch, est.roll, phase}) line += "," + formatNumber(v);
    for (double v : targets.q) line += "," + formatNumber(v);
    for (double v : sim.q) line += "," + formatNumber(v);
    line += "\n";
    sink(line);

    sim = simStep(sim, cmd, res.servo, dt, sc.truth);
    // Time from the tick index, so long runs do not accumulate rounding.
    sim.time = static_cast<double>(k + 1) * dt;
  }
  summary.ticks = ticks;
  summary.rmsTiltError = ticks > 0 ? std::sqrt(sqErr / (2.0 * static_cast<double>(ticks))) : 0.0;
  return summary;
}

std::string runScenarioLog(const Scenario& sc, const SimResources& res, RunSummary* summary) {
  std::string out;
  const RunSummary s = runScenario(sc, res, [&](std::string_view chunk) { out.append(chunk); });
  if (summary) *summary = s;
  return out;
}

Json logMetadata(const Scenario& sc) {
  return {{"generator", std::string(kNoiseGenerator)},
          {"seed", sc.seed},
          {"rate", sc.rate},
          {"duration", sc.duration},
          {"controller", sc.controller == Scenario::Controller::Gait ? "gait" : "motion"}};
}

}  // namespace hop
