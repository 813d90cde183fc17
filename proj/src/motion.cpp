#include "hop/motion.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"

namespace hop {
namespace {

std::string kfPath(std::size_t i) { return "keyframes[" + std::to_string(i) + "]"; }

JointArray readJoints(const Json& obj, const char* key, const std::string& path) {
  const auto v = schema::numbers(obj, key, kNumJoints, path);
  JointArray out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Json jointsJson(const JointArray& a) { return Json(std::vector<double>(a.begin(), a.end())); }

PidGains readGains(const Json& j, const std::string& path) {
  schema::onlyKeys(j, {"P", "I", "D", "enabled"}, path);
  return {schema::number(j, "P", path), schema::number(j, "I", path), schema::number(j, "D", path)};
}

bool readBool(const Json& j, const char* key, const std::string& path) {
  const Json& v = schema::field(j, key, path);
  if (!v.is_boolean()) throw SchemaError(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

}  // namespace

void validateMotion(const Motion& m) {
  if (m.name.empty()) throw SchemaError("name", "motion name must not be empty");
  if (m.keyframes.size() < 2) throw SchemaError("keyframes", "a motion needs at least 2 keyframes");
  for (std::size_t i = 0; i < m.keyframes.size(); ++i) {
    const Keyframe& k = m.keyframes[i];
    if (!std::isfinite(k.time) || k.time < 0.0) throw SchemaError(kfPath(i) + ".t", "time must be >= 0");
    if (i > 0 && !(k.time > m.keyframes[i - 1].time))
      throw SchemaError(kfPath(i) + ".t", "keyframe times must be strictly increasing (keyframe " + std::to_string(i) + ")");
    for (int j = 0; j < kNumJoints; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (!std::isfinite(k.positions[u]) || !std::isfinite(k.velocities[u]))
        throw SchemaError(kfPath(i), "non-finite joint value");
      if (!(k.efforts[u] >= 0.0 && k.efforts[u] <= 1.0))
        throw SchemaError(kfPath(i) + ".eff[" + std::to_string(j) + "]", "effort must lie in [0, 1]");
    }
    if (!(k.support.left >= 0.0 && k.support.left <= 1.0) || !(k.support.right >= 0.0 && k.support.right <= 1.0))
      throw SchemaError(kfPath(i) + ".sup", "support coefficients must lie in [0, 1]");
  }
  const MotionPid& p = m.pid;
  for (const PidGains* g : {&p.pitch, &p.roll})
    if (!std::isfinite(g->p) || !std::isfinite(g->i) || !std::isfinite(g->d)) throw SchemaError("pid", "gains must be finite");
  if (!(p.integralLimit >= 0.0)) throw SchemaError("pid.i_limit", "must be >= 0");
  for (int j = 0; j < kNumJoints; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (!(std::abs(p.pitchMap[u]) <= 1.0) || !(std::abs(p.rollMap[u]) <= 1.0))
      throw SchemaError("pid.map", "joint weights must lie in [-1, 1]");
  }
}

Motion motionFromJson(const Json& doc) {
  schema::onlyKeys(doc, {"name", "keyframes", "pid"}, "");
  Motion m;
  m.name = schema::string(doc, "name", "");
  const Json& kfs = schema::field(doc, "keyframes", "");
  if (!kfs.is_array()) throw SchemaError("keyframes", "expected an array");
  for (std::size_t i = 0; i < kfs.size(); ++i) {
    const std::string path = kfPath(i);
    schema::onlyKeys(kfs[i], {"t", "pos", "vel", "eff", "sup"}, path);
    Keyframe k;
    k.time = schema::number(kfs[i], "t", path);
    k.positions = readJoints(kfs[i], "pos", path);
    k.velocities = readJoints(kfs[i], "vel", path);
    k.efforts = readJoints(kfs[i], "eff", path);
    const Json& sup = schema::field(kfs[i], "sup", path);
    schema::onlyKeys(sup, {"l", "r"}, path + ".sup");
    k.support = {schema::number(sup, "l", path + ".sup"), schema::number(sup, "r", path + ".sup")};
    m.keyframes.push_back(k);
  }
  if (doc.contains("pid")) {
    const Json& pid = doc["pid"];
    schema::onlyKeys(pid, {"pitch", "roll", "i_limit", "map"}, "pid");
    const Json& pitch = schema::field(pid, "pitch", "pid");
    const Json& roll = schema::field(pid, "roll", "pid");
    m.pid.pitch = readGains(pitch, "pid.pitch");
    m.pid.roll = readGains(roll, "pid.roll");
    m.pid.pitchEnabled = readBool(pitch, "enabled", "pid.pitch");
    m.pid.rollEnabled = readBool(roll, "enabled", "pid.roll");
    m.pid.integralLimit = schema::number(pid, "i_limit", "pid");
    const Json& map = schema::field(pid, "map", "pid");
    schema::onlyKeys(map, {"pitch", "roll"}, "pid.map");
    m.pid.pitchMap = readJoints(map, "pitch", "pid.map");
    m.pid.rollMap = readJoints(map, "roll", "pid.map");
  }
  validateMotion(m);
  return m;
}

Json motionToJson(const Motion& m) {
  Json kfs = Json::array();
  for (const Keyframe& k : m.keyframes) {
    kfs.push_back({{"t", k.time},
                   {"pos", jointsJson(k.positions)},
                   {"vel", jointsJson(k.velocities)},
                   {"eff", jointsJson(k.efforts)},
                   {"sup", {{"l", k.support.left}, {"r", k.support.right}}}});
  }
  const auto gains = [](const PidGains& g, bool enabled) {
    return Json{{"P", g.p}, {"I", g.i}, {"D", g.d}, {"enabled", enabled}};
  };
  Json pid = {{"pitch", gains(m.pid.pitch, m.pid.pitchEnabled)},
              {"roll", gains(m.pid.roll, m.pid.rollEnabled)},
              {"i_limit", m.pid.integralLimit},
              {"map", {{"pitch", jointsJson(m.pid.pitchMap)}, {"roll", jointsJson(m.pid.rollMap)}}}};
  return {{"name", m.name}, {"keyframes", kfs}, {"pid", pid}};
}

Motion loadMotion(const std::filesystem::path& path) { return motionFromJson(readJsonFile(path)); }

std::string saveMotion(const Motion& m) { return canonicalDump(motionToJson(m)) + "\n"; }

MotionFrame interpolate(const Motion& m, double t) {
  if (m.keyframes.size() < 2) throw InvalidArgument("motion needs at least 2 keyframes");
  const double t0 = m.keyframes.front().time, t1 = m.keyframes.back().time;
  if (!std::isfinite(t) || t < t0 - 1e-6 || t > t1 + 1e-6) throw InvalidArgument("interpolation time outside the motion");
  t = std::clamp(t, t0, t1);

  // Segment k spans [time_k, time_k+1); the final knot belongs to the last segment.
  auto it = std::upper_bound(m.keyframes.begin(), m.keyframes.end(), t,
                             [](double v, const Keyframe& k) { return v < k.time; });
  std::size_t k = static_cast<std::size_t>(std::distance(m.keyframes.begin(), it));
  k = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, m.keyframes.size() - 2);
  const Keyframe& a = m.keyframes[k];
  const Keyframe& b = m.keyframes[k + 1];

  const double h = b.time - a.time;
  const double s = (t - a.time) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;

  MotionFrame f;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    f.positions[j] = h00 * a.positions[j] + h10 * h * a.velocities[j] + h01 * b.positions[j] + h11 * h * b.velocities[j];
    f.velocities[j] = (d00 * a.positions[j] + d01 * b.positions[j]) / h + d10 * a.velocities[j] + d11 * b.velocities[j];
    f.efforts[j] = (1 - s) * a.efforts[j] + s * b.efforts[j];
  }
  f.support.left = std::clamp((1 - s) * a.support.left + s * b.support.left, 0.0, 1.0);
  f.support.right = std::clamp((1 - s) * a.support.right + s * b.support.right, 0.0, 1.0);
  return f;
}

PlayOutput playTick(const Motion& m, const PlayState& state, const FusedAngles& fused, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  PlayOutput out;
  out.state = state;
  PlayState& next = out.state;
  const double t = std::min(state.time, m.duration());
  out.frame = interpolate(m, t);

  const MotionPid& pid = m.pid;
  if (pid.pitchEnabled || pid.rollEnabled) {
    const auto axis = [&](bool enabled, const PidGains& g, double dev, double prev, double& integral) {
      if (!enabled) return 0.0;
      integral += dev * dt;
      if (g.i != 0.0) {
        const double bound = pid.integralLimit / std::abs(g.i);
        integral = std::clamp(integral, -bound, bound);
      }
      const double deriv = state.hasPrev ? (dev - prev) / dt : 0.0;
      return g.p * dev + g.i * integral + g.d * deriv;
    };
    out.pitchCorrection = axis(pid.pitchEnabled, pid.pitch, fused.pitch, state.prevPitch, next.pitchIntegral);
    out.rollCorrection = axis(pid.rollEnabled, pid.roll, fused.roll, state.prevRoll, next.rollIntegral);
    for (std::size_t j = 0; j < kNumJoints; ++j)
      out.frame.positions[j] += pid.pitchMap[j] * out.pitchCorrection + pid.rollMap[j] * out.rollCorrection;
  }
  next.prevPitch = fused.pitch;
  next.prevRoll = fused.roll;
  next.hasPrev = true;

  next.time = state.time + dt;
  next.finished = next.time >= m.duration();
  out.completed = next.finished;
  return out;
}

}  // namespace hop
