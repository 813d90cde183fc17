#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hop/json_io.hpp"
#include "hop/orientation.hpp"

namespace hop {

inline constexpr int kNumJoints = 20;

// Model joint order. Chains are listed parent to child.
enum class Joint : int {
  NeckYaw, HeadPitch,
  LShoulderPitch, LShoulderRoll, LElbowPitch,
  RShoulderPitch, RShoulderRoll, RElbowPitch,
  LHipYaw, LHipRoll, LHipPitch, LKneePitch, LAnklePitch, LAnkleRoll,
  RHipYaw, RHipRoll, RHipPitch, RKneePitch, RAnklePitch, RAnkleRoll,
};

enum class Side : int { Left = 0, Right = 1 };

const std::array<std::string_view, kNumJoints>& jointNames();
int jointIndex(std::string_view name);  // -1 if unknown
constexpr int idx(Joint j) { return static_cast<int>(j); }
// First joint of a limb chain: 6 leg joints from hip yaw, 3 arm joints from shoulder pitch.
constexpr int legBase(Side s) { return s == Side::Left ? idx(Joint::LHipYaw) : idx(Joint::RHipYaw); }
constexpr int armBase(Side s) { return s == Side::Left ? idx(Joint::LShoulderPitch) : idx(Joint::RShoulderPitch); }

struct JointPose {
  std::array<double, kNumJoints> q{};

  double& operator[](int i) { return q[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return q[static_cast<std::size_t>(i)]; }
  double& operator[](Joint j) { return q[static_cast<std::size_t>(idx(j))]; }
  double operator[](Joint j) const { return q[static_cast<std::size_t>(idx(j))]; }
  std::span<const double> span() const { return q; }
  bool operator==(const JointPose&) const = default;
};

struct AbstractLeg {
  double extension = 0.0;
  double angleX = 0.0, angleY = 0.0, angleZ = 0.0;
  double footAngleX = 0.0, footAngleY = 0.0;
  bool operator==(const AbstractLeg&) const = default;
};

struct AbstractArm {
  double extension = 0.0;
  double angleX = 0.0, angleY = 0.0;
  bool operator==(const AbstractArm&) const = default;
};

struct AbstractPose {
  std::array<AbstractLeg, 2> legs{};
  std::array<AbstractArm, 2> arms{};
  double neckYaw = 0.0, headPitch = 0.0;  // passed through unchanged

  AbstractLeg& leg(Side s) { return legs[static_cast<std::size_t>(s)]; }
  const AbstractLeg& leg(Side s) const { return legs[static_cast<std::size_t>(s)]; }
  AbstractArm& arm(Side s) { return arms[static_cast<std::size_t>(s)]; }
  const AbstractArm& arm(Side s) const { return arms[static_cast<std::size_t>(s)]; }
  bool operator==(const AbstractPose&) const = default;
};

struct Transform {
  Vec3 position = Vec3::Zero();
  RotationQuat orientation;
  Mat3 rotation = Mat3::Identity();
};

// End effector pose relative to the trunk frame.
struct EndEffectorPose {
  Vec3 position = Vec3::Zero();
  RotationQuat orientation;
};

struct InversePose {
  std::array<EndEffectorPose, 2> legs{};  // sole frames
  std::array<EndEffectorPose, 2> arms{};  // hand points (orientation of the forearm)
};

struct Link {
  std::string name;
  int parent = -1;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin = Vec3::Zero();
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about the COM, link frame
  double lower = 0.0, upper = 0.0;
};

// Generic tree of revolute joints. Link 0 is the root (no joint); link i > 0
// is driven by joint i - 1 and links are stored parent-before-child.
class KinematicTree {
 public:
  static KinematicTree fromJson(const Json& doc);

  const std::vector<Link>& links() const { return m_links; }
  int jointCount() const { return static_cast<int>(m_links.size()) - 1; }
  int linkIndex(std::string_view name) const;
  double totalMass() const { return m_totalMass; }

  // Link transforms in the root frame.
  std::vector<Transform> forward(std::span<const double> q) const;

  // Fixed-base recursive Newton-Euler. `gravity` is the gravitational
  // acceleration expressed in the root frame.
  std::vector<double> inverseDynamics(std::span<const double> q, std::span<const double> qd,
                                      std::span<const double> qdd, const Vec3& gravity) const;

  Json toJson() const;

 private:
  friend class RobotModel;
  std::vector<Link> m_links;
  double m_totalMass = 0.0;
};

class RobotModel {
 public:
  // Validates the humanoid structure on top of the generic tree checks.
  static RobotModel fromJson(const Json& doc);
  static RobotModel load(const std::filesystem::path& path);

  const KinematicTree& tree() const { return m_tree; }
  double totalMass() const { return m_tree.totalMass(); }
  double thighLength() const { return m_thigh; }
  double shankLength() const { return m_shank; }
  const Vec3& soleOffset() const { return m_soleOffset; }
  const Vec3& handOffset() const { return m_handOffset; }
  Vec3 hipPosition(Side s) const;
  double lowerLimit(int joint) const { return m_tree.links()[static_cast<std::size_t>(joint + 1)].lower; }
  double upperLimit(int joint) const { return m_tree.links()[static_cast<std::size_t>(joint + 1)].upper; }
  bool withinLimits(const JointPose& q, double tol = 0.0) const;
  JointPose clampToLimits(const JointPose& q, bool* clamped = nullptr) const;
  const Json& document() const { return m_document; }

 private:
  KinematicTree m_tree;
  double m_thigh = 0.0, m_shank = 0.0;
  Vec3 m_soleOffset = Vec3::Zero();
  Vec3 m_handOffset = Vec3::Zero();
  Json m_document;
};

// Link name -> transform in the trunk frame.
std::map<std::string, Transform> forwardKinematics(const RobotModel& model, const JointPose& q);
EndEffectorPose solePose(const RobotModel& model, const JointPose& q, Side side);
InversePose jointToInverse(const RobotModel& model, const JointPose& q);

JointPose abstractToJoint(const AbstractPose& a, const RobotModel& model);
AbstractPose jointToAbstract(const JointPose& q, const RobotModel& model);

// Closed-form 6-DOF leg IK for a sole target; knee-forward branch.
// Returns hip yaw, hip roll, hip pitch, knee, ankle pitch, ankle roll.
std::array<double, 6> legInverseKinematics(const EndEffectorPose& sole, Side side, const RobotModel& model);

std::array<double, kNumJoints> inverseDynamics(const RobotModel& model, const JointPose& q, const JointPose& qd,
                                               const JointPose& qdd, const Vec3& gravity);

}  // namespace hop
