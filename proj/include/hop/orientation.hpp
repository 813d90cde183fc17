#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle to (-pi, pi]. Every module uses this one helper so that the
// boundary is treated identically everywhere.
double wrapAngle(double angle);

// Unit quaternion in canonical form (w >= 0). Construction normalizes.
class RotationQuat {
 public:
  RotationQuat() = default;
  RotationQuat(double w, double x, double y, double z);
  static RotationQuat identity() { return {}; }
  static RotationQuat fromEigen(const Eigen::Quaterniond& q);
  static RotationQuat fromMatrix(const Mat3& m);

  double w() const { return m_w; }
  double x() const { return m_x; }
  double y() const { return m_y; }
  double z() const { return m_z; }

  Eigen::Quaterniond toEigen() const { return {m_w, m_x, m_y, m_z}; }
  Mat3 toMatrix() const;
  Vec3 rotate(const Vec3& v) const;
  RotationQuat inverse() const { return {m_w, -m_x, -m_y, -m_z}; }
  RotationQuat operator*(const RotationQuat& rhs) const;

  // Same rotation (q and -q are identified).
  bool isApprox(const RotationQuat& other, double tol) const;

 private:
  double m_w = 1.0, m_x = 0.0, m_y = 0.0, m_z = 0.0;
};

// Fused yaw/pitch/roll plus hemisphere. Pitch and roll are the tilt
// projections; yaw is the twist about the global vertical.
struct FusedAngles {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  int hemisphere = 1;

  // Checks ranges and sin^2(pitch) + sin^2(roll) <= 1 (+1e-12).
  bool valid() const;
};

RotationQuat quatFromAxisAngle(const Vec3& axis, double angle);
RotationQuat rotZ(double angle);

FusedAngles fusedFromQuat(const RotationQuat& q);
RotationQuat quatFromFused(const FusedAngles& f);
double fusedYawOf(const RotationQuat& q);

// Tilt-only part: rotation with zero fused yaw and the same pitch/roll.
RotationQuat tiltOf(const RotationQuat& q);

}  // namespace hop
