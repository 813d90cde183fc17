#include "hop/orientation.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"

namespace hop {

double wrapAngle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

RotationQuat::RotationQuat(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("quaternion must have finite non-zero norm");
  const double s = (w < 0.0 ? -1.0 : 1.0) / n;
  m_w = s * w;
  m_x = s * x;
  m_y = s * y;
  m_z = s * z;
}

RotationQuat RotationQuat::fromEigen(const Eigen::Quaterniond& q) { return {q.w(), q.x(), q.y(), q.z()}; }

RotationQuat RotationQuat::fromMatrix(const Mat3& m) { return fromEigen(Eigen::Quaterniond(m)); }

Mat3 RotationQuat::toMatrix() const { return toEigen().toRotationMatrix(); }

Vec3 RotationQuat::rotate(const Vec3& v) const { return toEigen() * v; }

RotationQuat RotationQuat::operator*(const RotationQuat& r) const {
  return {m_w * r.m_w - m_x * r.m_x - m_y * r.m_y - m_z * r.m_z,
          m_w * r.m_x + m_x * r.m_w + m_y * r.m_z - m_z * r.m_y,
          m_w * r.m_y - m_x * r.m_z + m_y * r.m_w + m_z * r.m_x,
          m_w * r.m_z + m_x * r.m_y - m_y * r.m_x + m_z * r.m_w};
}

bool RotationQuat::isApprox(const RotationQuat& o, double tol) const {
  const double dot = m_w * o.m_w + m_x * o.m_x + m_y * o.m_y + m_z * o.m_z;
  const double s = dot < 0.0 ? -1.0 : 1.0;
  return std::abs(m_w - s * o.m_w) <= tol && std::abs(m_x - s * o.m_x) <= tol &&
         std::abs(m_y - s * o.m_y) <= tol && std::abs(m_z - s * o.m_z) <= tol;
}

bool FusedAngles::valid() const {
  if (!std::isfinite(yaw) || !std::isfinite(pitch) || !std::isfinite(roll)) return false;
  if (yaw <= -kPi || yaw > kPi) return false;
  if (std::abs(pitch) > kPi / 2 || std::abs(roll) > kPi / 2) return false;
  if (hemisphere != 1 && hemisphere != -1) return false;
  const double sp = std::sin(pitch), sr = std::sin(roll);
  return sp * sp + sr * sr <= 1.0 + 1e-12;
}

RotationQuat quatFromAxisAngle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!std::isfinite(angle) || !(std::abs(n - 1.0) <= 1e-6))
    throw InvalidArgument("rotation axis must be a unit vector");
  const Vec3 u = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z()};
}

RotationQuat rotZ(double angle) { return {std::cos(0.5 * angle), 0.0, 0.0, std::sin(0.5 * angle)}; }

double fusedYawOf(const RotationQuat& q) { return wrapAngle(2.0 * std::atan2(q.z(), q.w())); }

FusedAngles fusedFromQuat(const RotationQuat& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  // Third row of the rotation matrix: the global z-axis in body coordinates.
  const double r31 = 2.0 * (x * z - w * y);
  const double r32 = 2.0 * (y * z + w * x);
  const double r33 = w * w - x * x - y * y + z * z;

  FusedAngles f;
  f.yaw = fusedYawOf(q);
  f.pitch = std::atan2(-r31, std::sqrt(r32 * r32 + r33 * r33));
  f.roll = std::atan2(r32, std::sqrt(r31 * r31 + r33 * r33));
  f.hemisphere = r33 >= 0.0 ? 1 : -1;
  return f;
}

RotationQuat quatFromFused(const FusedAngles& f) {
  const double sth = std::sin(f.pitch), sphi = std::sin(f.roll);
  const double crit = sth * sth + sphi * sphi;
  if (!std::isfinite(crit) || crit > 1.0 + 1e-12) throw InvalidArgument("fused pitch/roll exceed the unit sine disc");
  if (f.hemisphere != 1 && f.hemisphere != -1) throw InvalidArgument("hemisphere must be +1 or -1");

  const double sgamma = std::sqrt(std::min(crit, 1.0));
  const double cgamma = f.hemisphere * std::sqrt(std::max(0.0, 1.0 - crit));
  const double gamma = std::atan2(sgamma, cgamma);

  // Tilt axis lies in the horizontal plane.
  double ux = 1.0, uy = 0.0;
  if (sgamma > 0.0) {
    ux = sphi / sgamma;
    uy = sth / sgamma;
  }
  const double tw = std::cos(0.5 * gamma), ts = std::sin(0.5 * gamma);
  const double tx = ts * ux, ty = ts * uy;

  const double c = std::cos(0.5 * f.yaw), s = std::sin(0.5 * f.yaw);
  return {c * tw, c * tx - s * ty, c * ty + s * tx, s * tw};
}

RotationQuat tiltOf(const RotationQuat& q) {
  return rotZ(-fusedYawOf(q)) * q;
}

}  // namespace hop
