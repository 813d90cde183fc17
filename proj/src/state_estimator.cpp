#include "hop/state_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hop/errors.hpp"

namespace hop {
namespace {

// First-order quaternion step q <- normalize(q * (1, w*dt/2)).
RotationQuat integrateBody(const RotationQuat& q, const Vec3& rate, double dt) {
  const double hx = 0.5 * dt * rate.x(), hy = 0.5 * dt * rate.y(), hz = 0.5 * dt * rate.z();
  return {q.w() - q.x() * hx - q.y() * hy - q.z() * hz,
          q.x() + q.w() * hx + q.y() * hz - q.z() * hy,
          q.y() + q.w() * hy - q.x() * hz + q.z() * hx,
          q.z() + q.w() * hz + q.x() * hy - q.y() * hx};
}

Json mat3ToJson(const Mat3& m) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

}  // namespace

void FilterConfig::validate() const {
  if (!(kp >= 0.0) || !std::isfinite(kp)) throw InvalidArgument("filter gain Kp must be >= 0");
  if (!(ti > 0.0) || !std::isfinite(ti)) throw InvalidArgument("filter integral time Ti must be > 0");
  if (!(km >= 0.0) || !std::isfinite(km)) throw InvalidArgument("magnetometer gain Km must be >= 0");
  if (!(accelTrustBand > 0.0)) throw InvalidArgument("accelerometer trust band must be > 0");
  if (!(biasErrorBand > 0.0)) throw InvalidArgument("bias error band must be > 0");
  if (!magMatrix.allFinite() || !magOffset.allFinite()) throw InvalidArgument("magnetometer calibration must be finite");
}

Json FilterConfig::toJson() const {
  return {{"kp", kp},
          {"ti", ti},
          {"km", km},
          {"accel_trust_band", accelTrustBand},
          {"bias_error_band", biasErrorBand},
          {"mag_matrix", mat3ToJson(magMatrix)},
          {"mag_offset", {magOffset.x(), magOffset.y(), magOffset.z()}}};
}

FilterConfig FilterConfig::fromJson(const Json& j, const std::string& path) {
  schema::onlyKeys(j, {"kp", "ti", "km", "accel_trust_band", "bias_error_band", "mag_matrix", "mag_offset"}, path);
  FilterConfig c;
  c.kp = schema::numberOr(j, "kp", c.kp, path);
  c.ti = schema::numberOr(j, "ti", c.ti, path);
  c.km = schema::numberOr(j, "km", c.km, path);
  c.accelTrustBand = schema::numberOr(j, "accel_trust_band", c.accelTrustBand, path);
  c.biasErrorBand = schema::numberOr(j, "bias_error_band", c.biasErrorBand, path);
  if (j.contains("mag_offset")) c.magOffset = schema::vec3(j, "mag_offset", path);
  if (j.contains("mag_matrix")) {
    const Json& m = j["mag_matrix"];
    if (!m.is_array() || m.size() != 3) throw SchemaError(path + ".mag_matrix", "expected 3 rows");
    for (int r = 0; r < 3; ++r) {
      if (!m[r].is_array() || m[r].size() != 3)
        throw SchemaError(path + ".mag_matrix[" + std::to_string(r) + "]", "expected 3 columns");
      for (int col = 0; col < 3; ++col) c.magMatrix(r, col) = m[r][col].get<double>();
    }
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
  return c;
}

FilterState filterInit(const FilterConfig& config, std::optional<RotationQuat> initialAttitude) {
  config.validate();
  FilterState s;
  s.config = config;
  s.attitude = initialAttitude.value_or(RotationQuat::identity());
  return s;
}

FilterState filterUpdate(const FilterState& state, const ImuSample& sample, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("filter dt must be positive");
  if (dt > kMaxFilterDt) throw InvalidArgument("filter dt exceeds 0.1 s (stalled stream)");
  const FilterConfig& cfg = state.config;
  FilterState next = state;

  // Estimated gravity (up) direction in body coordinates.
  const Vec3 upEst = state.attitude.inverse().rotate(Vec3::UnitZ());

  Vec3 tiltError = Vec3::Zero();
  const double accNorm = sample.accel.norm();
  if (accNorm > 0.0) {
    const double trust = std::clamp(1.0 - std::abs(accNorm - kGravity) / cfg.accelTrustBand, 0.0, 1.0);
    tiltError = trust * (sample.accel / accNorm).cross(upEst);
  }

  // Tilt part, in the body frame.
  const Vec3 rate = sample.gyro - state.gyroBias + cfg.kp * tiltError;
  next.attitude = integrateBody(state.attitude, rate, dt);

  const double ki = cfg.kp / cfg.ti;
  const double learn = std::max(0.0, 1.0 - std::asin(std::min(1.0, tiltError.norm())) / cfg.biasErrorBand);
  next.gyroBias = state.gyroBias - ki * learn * tiltError * dt;

  // Heading part: rotation about the global vertical only, so the
  // magnetometer can never disturb pitch or roll.
  if (cfg.km > 0.0 || state.headingBias != 0.0) {
    double headingError = 0.0;
    const Vec3 mag = cfg.magMatrix * (sample.mag - cfg.magOffset);
    const Vec3 magGlobal = next.attitude.rotate(mag);
    const double horiz = std::hypot(magGlobal.x(), magGlobal.y());
    if (cfg.km > 0.0 && horiz > 1e-9) headingError = -std::atan2(magGlobal.y(), magGlobal.x());
    const double headingRate = cfg.kp * cfg.km * headingError - state.headingBias;
    next.attitude = rotZ(headingRate * dt) * next.attitude;
    next.headingBias = state.headingBias - ki * learn * cfg.km * headingError * dt;
  }
  return next;
}

FusedAngles estimateFused(const FilterState& state) { return fusedFromQuat(state.attitude); }

Vec3 gyroBiasEstimate(const FilterState& state) {
  return state.gyroBias + state.headingBias * state.attitude.inverse().rotate(Vec3::UnitZ());
}

std::vector<ImuSample> parseImuCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv", "empty replay file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,gx,gy,gz,ax,ay,az,mx,my,mz") throw SchemaError("csv.header", "expected t,gx,gy,gz,ax,ay,az,mx,my,mz");
  std::vector<ImuSample> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string cell;
    double v[10];
    int n = 0;
    while (std::getline(ls, cell, ',') && n < 10) {
      try {
        v[n++] = std::stod(cell);
      } catch (const std::exception&) {
        throw SchemaError("csv.line" + std::to_string(row), "not a number: " + cell);
      }
    }
    if (n != 10) throw SchemaError("csv.line" + std::to_string(row), "expected 10 columns");
    ImuSample s;
    s.timestamp = v[0];
    s.gyro = {v[1], v[2], v[3]};
    s.accel = {v[4], v[5], v[6]};
    s.mag = {v[7], v[8], v[9]};
    if (!out.empty() && !(s.timestamp > out.back().timestamp))
      throw SchemaError("csv.line" + std::to_string(row), "timestamps must be strictly increasing");
    out.push_back(s);
  }
  return out;
}

std::vector<ImuSample> readImuCsv(const std::filesystem::path& path) { return parseImuCsv(readTextFile(path)); }

}  // namespace hop
