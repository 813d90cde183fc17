#include "hop/servo.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"

namespace hop {

ServoCalibration ServoCalibration::defaults() {
  ServoCalibration c;
  // Stiffness estimates scale with stall torque: MX-106 legs vs MX-64 head/arms.
  for (int j = 0; j < kNumJoints; ++j) {
    const bool leg = j >= legBase(Side::Left);
    c.joints[static_cast<std::size_t>(j)].stiffness = leg ? 28.0 : 20.0;
  }
  return c;
}

ServoCalibration ServoCalibration::fromJson(const Json& doc) {
  schema::onlyKeys(doc, {"schema_version", "notes", "joints"}, "");
  if (schema::integer(doc, "schema_version", "") != 1) throw SchemaError("schema_version", "unsupported version");
  const Json& arr = schema::field(doc, "joints", "");
  if (!arr.is_array() || arr.size() != kNumJoints) throw SchemaError("joints", "expected 20 joint records");
  ServoCalibration c;
  std::array<bool, kNumJoints> seen{};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "joints[" + std::to_string(i) + "]";
    schema::onlyKeys(arr[i], {"name", "tick_offset", "direction", "stiffness", "max_offset"}, path);
    const int j = jointIndex(schema::string(arr[i], "name", path));
    if (j < 0) throw SchemaError(path + ".name", "unknown joint");
    if (seen[static_cast<std::size_t>(j)]) throw SchemaError(path + ".name", "duplicate joint");
    seen[static_cast<std::size_t>(j)] = true;
    JointCalibration jc;
    jc.tickOffset = schema::integer(arr[i], "tick_offset", path);
    jc.direction = schema::integer(arr[i], "direction", path);
    jc.stiffness = schema::number(arr[i], "stiffness", path);
    jc.maxOffset = schema::number(arr[i], "max_offset", path);
    if (jc.tickOffset < 0 || jc.tickOffset > kMaxTick) throw SchemaError(path + ".tick_offset", "must lie in [0, 4095]");
    if (jc.direction != 1 && jc.direction != -1) throw SchemaError(path + ".direction", "must be +1 or -1");
    if (!(jc.stiffness > 0.0)) throw SchemaError(path + ".stiffness", "must be > 0");
    if (!(jc.maxOffset > 0.0)) throw SchemaError(path + ".max_offset", "must be > 0");
    c.joints[static_cast<std::size_t>(j)] = jc;
  }
  return c;
}

ServoCalibration ServoCalibration::load(const std::filesystem::path& path) { return fromJson(readJsonFile(path)); }

Json ServoCalibration::toJson() const {
  Json arr = Json::array();
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& jc = joints[static_cast<std::size_t>(j)];
    arr.push_back({{"name", std::string(jointNames()[static_cast<std::size_t>(j)])},
                   {"tick_offset", jc.tickOffset},
                   {"direction", jc.direction},
                   {"stiffness", jc.stiffness},
                   {"max_offset", jc.maxOffset}});
  }
  return {{"schema_version", 1}, {"joints", arr}};
}

TickResult angleToTicks(double angle, const JointCalibration& cal) {
  if (!std::isfinite(angle)) throw InvalidArgument("joint angle must be finite");
  const double raw = std::round(cal.tickOffset + cal.direction * angle * kTicksPerRev / (2.0 * kPi));
  TickResult r;
  r.clamped = raw < 0.0 || raw > kMaxTick;
  r.ticks = static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(kMaxTick)));
  return r;
}

double ticksToAngle(int ticks, const JointCalibration& cal) {
  return cal.direction * (ticks - cal.tickOffset) * (2.0 * kPi / kTicksPerRev);
}

std::array<double, kNumJoints> feedforwardOffsets(const std::array<double, kNumJoints>& torques, const ServoCalibration& cal) {
  std::array<double, kNumJoints> out{};
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& jc = cal[j];
    const double tau = torques[static_cast<std::size_t>(j)];
    if (!std::isfinite(tau)) throw InvalidArgument("feed-forward torque must be finite");
    out[static_cast<std::size_t>(j)] = std::clamp(tau / jc.stiffness, -jc.maxOffset, jc.maxOffset);
  }
  return out;
}

ServoCommand packageCommands(const JointPose& targets, const std::array<double, kNumJoints>& offsets,
                             const std::array<double, kNumJoints>& efforts, const ServoCalibration& cal) {
  ServoCommand cmd;
  for (int j = 0; j < kNumJoints; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const TickResult t = angleToTicks(targets[j] + offsets[i], cal[j]);
    cmd.joints[i].targetTicks = t.ticks;
    cmd.joints[i].effort = std::clamp(efforts[i], 0.0, 1.0);
    if (t.clamped) cmd.clampedJoints.push_back(j);
  }
  return cmd;
}

void writeCommandLogHeader(std::ostream& out) { out << "t,joint,target_ticks,offset_rad,effort\n"; }

void appendCommandLog(std::ostream& out, double t, const ServoCommand& cmd, const std::array<double, kNumJoints>& offsets) {
  for (int j = 0; j < kNumJoints; ++j) {
    const auto i = static_cast<std::size_t>(j);
    out << formatNumber(t) << ',' << jointNames()[i] << ',' << cmd.joints[i].targetTicks << ','
        << formatNumber(offsets[i]) << ',' << formatNumber(cmd.joints[i].effort) << '\n';
  }
}

}  // namespace hop
