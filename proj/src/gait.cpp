#include "hop/gait.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"

namespace hop {
namespace {

double slew(double current, double target, double maxStep) {
  return current + std::clamp(target - current, -maxStep, maxStep);
}

double deadbanded(double v, double band) { return std::abs(v) < band ? 0.0 : v; }

double saturate(double v, double bound) { return std::clamp(v, -bound, bound); }

double channel(const ChannelGains& g, double dev, double rate) { return saturate(g.p * dev + g.d * rate, g.sat); }

Json gainsJson(const ChannelGains& g) { return {{"P", g.p}, {"D", g.d}, {"sat", g.sat}}; }

ChannelGains gainsFrom(const Json& j, const std::string& path) {
  schema::onlyKeys(j, {"P", "D", "sat"}, path);
  ChannelGains g;
  g.p = schema::number(j, "P", path);
  g.d = schema::number(j, "D", path);
  g.sat = schema::number(j, "sat", path);
  if (g.sat < 0.0) throw SchemaError(path + ".sat", "saturation must be >= 0");
  return g;
}

}  // namespace

GaitCommand GaitCommand::clamped() const {
  return {std::clamp(vx, -1.0, 1.0), std::clamp(vy, -1.0, 1.0), std::clamp(wz, -1.0, 1.0), walk};
}

void GaitConfig::validate() const {
  if (!(freq > 0.0)) throw InvalidArgument("gait frequency must be > 0");
  if (!(haltExtension >= 0.0) || haltExtension + aStep > 1.0 || aStep < 0.0)
    throw InvalidArgument("leg extension waveform must stay within [0, 1]");
  if (!(armExtension >= 0.0 && armExtension <= 1.0)) throw InvalidArgument("arm extension must lie in [0, 1]");
  if (!(slewRate > 0.0)) throw InvalidArgument("command slew rate must be > 0");
  if (!(derivativeTimeConstant >= 0.0)) throw InvalidArgument("derivative time constant must be >= 0");
  if (!(deadband >= 0.0)) throw InvalidArgument("deadband must be >= 0");
  for (const ChannelGains* g : {&arm, &hipY, &footY, &hipX, &footX, &footHeight, &timing})
    if (!(g->sat >= 0.0)) throw InvalidArgument("channel saturation must be >= 0");
}

Json GaitConfig::toJson() const {
  return {{"freq", freq},
          {"eta0", haltExtension},
          {"arm_extension", armExtension},
          {"A_sag", aSag},
          {"A_lat", aLat},
          {"A_rot", aRot},
          {"A_step", aStep},
          {"A_sway", aSway},
          {"A_arm", aArm},
          {"channels",
           {{"arm", gainsJson(arm)},
            {"hipY", gainsJson(hipY)},
            {"footY", gainsJson(footY)},
            {"hipX", gainsJson(hipX)},
            {"footX", gainsJson(footX)},
            {"footHeight", gainsJson(footHeight)},
            {"timing", gainsJson(timing)}}},
          {"expectedPitch", expectedPitch},
          {"expectedRoll", expectedRoll},
          {"deadband", deadband},
          {"slewRate", slewRate},
          {"derivativeTimeConstant", derivativeTimeConstant},
          {"feedback", feedbackEnabled}};
}

GaitConfig GaitConfig::fromJson(const Json& doc) {
  schema::onlyKeys(doc,
                   {"schema_version", "notes", "freq", "eta0", "arm_extension", "A_sag", "A_lat", "A_rot", "A_step", "A_sway",
                    "A_arm", "channels", "expectedPitch", "expectedRoll", "deadband", "slewRate", "derivativeTimeConstant",
                    "feedback"},
                   "");
  GaitConfig c;
  c.freq = schema::numberOr(doc, "freq", c.freq, "");
  c.haltExtension = schema::numberOr(doc, "eta0", c.haltExtension, "");
  c.armExtension = schema::numberOr(doc, "arm_extension", c.armExtension, "");
  c.aSag = schema::numberOr(doc, "A_sag", c.aSag, "");
  c.aLat = schema::numberOr(doc, "A_lat", c.aLat, "");
  c.aRot = schema::numberOr(doc, "A_rot", c.aRot, "");
  c.aStep = schema::numberOr(doc, "A_step", c.aStep, "");
  c.aSway = schema::numberOr(doc, "A_sway", c.aSway, "");
  c.aArm = schema::numberOr(doc, "A_arm", c.aArm, "");
  c.expectedPitch = schema::numberOr(doc, "expectedPitch", c.expectedPitch, "");
  c.expectedRoll = schema::numberOr(doc, "expectedRoll", c.expectedRoll, "");
  c.deadband = schema::numberOr(doc, "deadband", c.deadband, "");
  c.slewRate = schema::numberOr(doc, "slewRate", c.slewRate, "");
  c.derivativeTimeConstant = schema::numberOr(doc, "derivativeTimeConstant", c.derivativeTimeConstant, "");
  if (doc.contains("feedback")) {
    if (!doc["feedback"].is_boolean()) throw SchemaError("feedback", "expected a boolean");
    c.feedbackEnabled = doc["feedback"].get<bool>();
  }
  if (doc.contains("channels")) {
    const Json& ch = doc["channels"];
    schema::onlyKeys(ch, {"arm", "hipY", "footY", "hipX", "footX", "footHeight", "timing"}, "channels");
    const auto read = [&](const char* key, ChannelGains& g) {
      if (ch.contains(key)) g = gainsFrom(ch[key], std::string("channels.") + key);
    };
    read("arm", c.arm);
    read("hipY", c.hipY);
    read("footY", c.footY);
    read("hipX", c.hipX);
    read("footX", c.footX);
    read("footHeight", c.footHeight);
    read("timing", c.timing);
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError("", e.what());
  }
  return c;
}

GaitConfig GaitConfig::load(const std::filesystem::path& path) { return fromJson(readJsonFile(path)); }

double phaseAdvance(double phase, double freq, double dt, double timingAdjust) {
  if (!(freq > 0.0)) throw InvalidArgument("gait frequency must be > 0");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  return wrapAngle(phase + 2.0 * kPi * freq * dt + timingAdjust * dt);
}

AbstractPose openLoopWaveform(double phase, const GaitCommand& cmdIn, const GaitConfig& c) {
  const GaitCommand cmd = cmdIn.clamped();
  AbstractPose pose;
  const double sway = c.aSway * std::sin(phase);
  for (Side s : {Side::Left, Side::Right}) {
    const double limbPhase = s == Side::Left ? phase : phase - kPi;
    const double cl = std::cos(limbPhase);
    AbstractLeg& leg = pose.leg(s);
    leg.extension = c.haltExtension + c.aStep * std::max(0.0, std::sin(limbPhase));
    leg.angleY = -c.aSag * cmd.vx * cl;
    leg.angleX = c.aLat * cmd.vy * cl + sway;
    leg.angleZ = c.aRot * cmd.wz * cl;

    AbstractArm& arm = pose.arm(s);
    arm.extension = c.armExtension;
    arm.angleY = c.aArm * cmd.vx * cl;
  }
  return pose;
}

CorrectiveActions feedbackCorrections(const TiltPair& dev, const TiltPair& rate, double phase, const GaitConfig& c) {
  const double pitch = deadbanded(dev.pitch, c.deadband);
  const double roll = deadbanded(dev.roll, c.deadband);
  CorrectiveActions a;
  a.armAngleY = channel(c.arm, pitch, rate.pitch);
  a.hipAngleY = channel(c.hipY, pitch, rate.pitch);
  a.footAngleY = channel(c.footY, pitch, rate.pitch);
  a.hipAngleX = channel(c.hipX, roll, rate.roll);
  a.footAngleX = channel(c.footX, roll, rate.roll);
  a.footHeight = channel(c.footHeight, roll, rate.roll);

  // Left leg swings while sin(phase) > 0. A positive roll leans the robot
  // onto its right leg; if that is the support side the lateral motion has
  // not come back yet and the step is held back.
  const double s = phase > 0.0 && phase < kPi ? 1.0 : (phase < 0.0 && phase > -kPi ? -1.0 : 0.0);
  a.timingAdjust = -std::min(c.timing.sat, c.timing.p * std::max(0.0, s * roll));
  return a;
}

void applyAbstractCorrections(AbstractPose& pose, const CorrectiveActions& a) {
  for (Side s : {Side::Left, Side::Right}) {
    AbstractLeg& leg = pose.leg(s);
    leg.angleY += a.hipAngleY;
    leg.angleX += a.hipAngleX;
    leg.footAngleY += a.footAngleY;
    leg.footAngleX += a.footAngleX;
    pose.arm(s).angleY += a.armAngleY;
  }
}

AbstractPose haltPose(const GaitConfig& c) {
  AbstractPose pose;
  for (Side s : {Side::Left, Side::Right}) {
    pose.leg(s).extension = c.haltExtension;
    pose.arm(s).extension = c.armExtension;
  }
  return pose;
}

GaitOutput gaitTick(const GaitState& state, const GaitCommand& cmdIn, const FusedAngles& fused, const RobotModel& model,
                    const GaitConfig& c, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const GaitCommand cmd = cmdIn.clamped();
  GaitOutput out;
  out.state = state;
  GaitState& next = out.state;
  next.correctionLimited = false;

  if (!cmd.walk) {
    next.commandSmoothed = {};
    next.hasPrevDeviation = false;
    next.deviationRate = {};
    next.lastActions = {};
    out.abstractPose = haltPose(c);
    out.targets = model.clampToLimits(abstractToJoint(out.abstractPose, model), &next.jointsClamped);
    return out;
  }

  const double step = c.slewRate * dt;
  next.commandSmoothed.vx = slew(state.commandSmoothed.vx, cmd.vx, step);
  next.commandSmoothed.vy = slew(state.commandSmoothed.vy, cmd.vy, step);
  next.commandSmoothed.wz = slew(state.commandSmoothed.wz, cmd.wz, step);
  next.commandSmoothed.walk = true;

  CorrectiveActions actions;
  if (c.feedbackEnabled) {
    const TiltPair dev{fused.pitch - c.expectedPitch, fused.roll - c.expectedRoll};
    if (state.hasPrevDeviation) {
      const double alpha = dt / (c.derivativeTimeConstant + dt);
      next.deviationRate.pitch += alpha * ((dev.pitch - state.prevDeviation.pitch) / dt - state.deviationRate.pitch);
      next.deviationRate.roll += alpha * ((dev.roll - state.prevDeviation.roll) / dt - state.deviationRate.roll);
    }
    next.prevDeviation = dev;
    next.hasPrevDeviation = true;
    actions = feedbackCorrections(dev, next.deviationRate, state.phase, c);
    actions.timingAdjust = std::max(actions.timingAdjust, -2.0 * kPi * c.freq);
  }
  next.lastActions = actions;

  next.phase = phaseAdvance(state.phase, c.freq, dt, actions.timingAdjust);
  out.abstractPose = openLoopWaveform(next.phase, next.commandSmoothed, c);
  if (actions != CorrectiveActions{}) applyAbstractCorrections(out.abstractPose, actions);
  JointPose q = abstractToJoint(out.abstractPose, model);

  if (actions.footHeight != 0.0) {
    const Side lifted = actions.footHeight > 0.0 ? Side::Left : Side::Right;
    double lift = std::abs(actions.footHeight);
    const EndEffectorPose base = solePose(model, q, lifted);
    for (int attempt = 0; attempt < 12; ++attempt) {
      EndEffectorPose target = base;
      target.position.z() += lift;
      try {
        const auto leg = legInverseKinematics(target, lifted, model);
        for (int k = 0; k < 6; ++k) q[legBase(lifted) + k] = leg[static_cast<std::size_t>(k)];
        break;
      } catch (const UnreachableError&) {
        next.correctionLimited = true;
        lift *= 0.5;
      }
    }
  }

  next.lastSupportLeg = std::sin(next.phase) > 0.0 ? Side::Right : Side::Left;
  out.targets = model.clampToLimits(q, &next.jointsClamped);
  return out;
}

}  // namespace hop
