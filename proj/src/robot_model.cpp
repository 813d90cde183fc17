#include "hop/robot_model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "hop/errors.hpp"

namespace hop {
namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "neck_yaw",         "head_pitch",
    "l_shoulder_pitch", "l_shoulder_roll", "l_elbow_pitch",
    "r_shoulder_pitch", "r_shoulder_roll", "r_elbow_pitch",
    "l_hip_yaw",        "l_hip_roll",      "l_hip_pitch",   "l_knee_pitch", "l_ankle_pitch", "l_ankle_roll",
    "r_hip_yaw",        "r_hip_roll",      "r_hip_pitch",   "r_knee_pitch", "r_ankle_pitch", "r_ankle_roll",
};

std::string linkPath(std::size_t i, const char* field = nullptr) {
  std::string p = "links[" + std::to_string(i) + "]";
  if (field) p += std::string(".") + field;
  return p;
}

Mat3 readInertia(const Json& obj, const std::string& path) {
  const Json& v = schema::field(obj, "inertia", path);
  const std::string p = path + ".inertia";
  if (!v.is_array() || v.size() != 3) throw SchemaError(p, "expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (!v[r].is_array() || v[r].size() != 3) throw SchemaError(p, "expected a 3x3 matrix");
    for (int c = 0; c < 3; ++c) {
      if (!v[r][c].is_number()) throw SchemaError(p, "expected numbers");
      m(r, c) = v[r][c].get<double>();
    }
  }
  if (!m.allFinite()) throw SchemaError(p, "non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw SchemaError(p, "inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  if (es.eigenvalues().minCoeff() < -1e-12) throw SchemaError(p, "inertia must be positive semi-definite");
  return m;
}

Json vecJson(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

const std::array<std::string_view, kNumJoints>& jointNames() { return kJointNames; }

int jointIndex(std::string_view name) {
  for (int i = 0; i < kNumJoints; ++i)
    if (kJointNames[static_cast<std::size_t>(i)] == name) return i;
  return -1;
}

// ---------------------------------------------------------------------------
// KinematicTree

KinematicTree KinematicTree::fromJson(const Json& doc) {
  schema::requireObject(doc, "");
  const Json& arr = schema::field(doc, "links", "");
  if (!arr.is_array() || arr.empty()) throw SchemaError("links", "expected a non-empty array");

  struct Raw {
    Link link;
    std::string parentName;
  };
  std::vector<Raw> raw;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& j = arr[i];
    const std::string path = linkPath(i);
    schema::onlyKeys(j, {"name", "parent", "axis", "origin", "mass", "com", "inertia", "limits", "notes"}, path);
    Raw r;
    r.link.name = schema::string(j, "name", path);
    const Json& parent = schema::field(j, "parent", path);
    if (parent.is_string()) r.parentName = parent.get<std::string>();
    else if (!parent.is_null()) throw SchemaError(linkPath(i, "parent"), "expected a link name or null");
    r.link.mass = schema::number(j, "mass", path);
    if (r.link.mass < 0.0) throw SchemaError(linkPath(i, "mass"), "mass must be >= 0");
    r.link.com = schema::vec3(j, "com", path);
    r.link.inertia = readInertia(j, path);
    if (!r.parentName.empty()) {
      r.link.axis = schema::vec3(j, "axis", path);
      if (std::abs(r.link.axis.norm() - 1.0) > 1e-9) throw SchemaError(linkPath(i, "axis"), "axis must be a unit vector");
      r.link.origin = schema::vec3(j, "origin", path);
      const auto lim = schema::numbers(j, "limits", 2, path);
      if (!(lim[0] <= lim[1])) throw SchemaError(linkPath(i, "limits"), "lower limit exceeds upper limit");
      r.link.lower = lim[0];
      r.link.upper = lim[1];
    }
    for (std::size_t k = 0; k < raw.size(); ++k)
      if (raw[k].link.name == r.link.name) throw SchemaError(linkPath(i, "name"), "duplicate link name '" + r.link.name + "'");
    raw.push_back(std::move(r));
  }

  std::size_t roots = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].parentName.empty()) {
      ++roots;
      continue;
    }
    const bool found = std::any_of(raw.begin(), raw.end(), [&](const Raw& o) { return o.link.name == raw[i].parentName; });
    if (!found) throw SchemaError(linkPath(i, "parent"), "missing parent '" + raw[i].parentName + "'");
  }
  if (roots != 1) throw SchemaError("links", "expected exactly one root link, found " + std::to_string(roots));

  // Kahn ordering in file order; whatever is left over sits on a cycle.
  KinematicTree tree;
  std::vector<bool> placed(raw.size(), false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (placed[i]) continue;
      int parentIdx = -1;
      if (!raw[i].parentName.empty()) {
        parentIdx = tree.linkIndex(raw[i].parentName);
        if (parentIdx < 0) continue;
      } else if (!tree.m_links.empty()) {
        continue;
      }
      Link l = raw[i].link;
      l.parent = parentIdx;
      tree.m_links.push_back(std::move(l));
      placed[i] = true;
      progress = true;
    }
  }
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!placed[i]) throw SchemaError(linkPath(i, "parent"), "cycle through link '" + raw[i].link.name + "'");

  for (const Link& l : tree.m_links) tree.m_totalMass += l.mass;
  return tree;
}

int KinematicTree::linkIndex(std::string_view name) const {
  for (std::size_t i = 0; i < m_links.size(); ++i)
    if (m_links[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<Transform> KinematicTree::forward(std::span<const double> q) const {
  if (static_cast<int>(q.size()) != jointCount()) throw InvalidArgument("joint vector size does not match the tree");
  std::vector<Transform> out(m_links.size());
  for (std::size_t i = 1; i < m_links.size(); ++i) {
    const Link& l = m_links[i];
    const Transform& p = out[static_cast<std::size_t>(l.parent)];
    Transform& t = out[i];
    t.position = p.position + p.rotation * l.origin;
    t.orientation = p.orientation * quatFromAxisAngle(l.axis, q[i - 1]);
    t.rotation = t.orientation.toMatrix();
  }
  return out;
}

std::vector<double> KinematicTree::inverseDynamics(std::span<const double> q, std::span<const double> qd,
                                                   std::span<const double> qdd, const Vec3& gravity) const {
  const auto n = static_cast<std::size_t>(jointCount());
  if (q.size() != n || qd.size() != n || qdd.size() != n) throw InvalidArgument("joint vector size does not match the tree");
  const std::vector<Transform> tf = forward(q);
  const std::size_t nl = m_links.size();

  std::vector<Vec3> omega(nl, Vec3::Zero()), alpha(nl, Vec3::Zero()), acc(nl, Vec3::Zero());
  std::vector<Vec3> force(nl, Vec3::Zero()), moment(nl, Vec3::Zero()), axisW(nl, Vec3::Zero());
  acc[0] = -gravity;  // fixed base accelerating against gravity

  for (std::size_t i = 0; i < nl; ++i) {
    const Link& l = m_links[i];
    if (i > 0) {
      const auto p = static_cast<std::size_t>(l.parent);
      axisW[i] = tf[i].rotation * l.axis;
      const Vec3 r = tf[i].position - tf[p].position;
      omega[i] = omega[p] + axisW[i] * qd[i - 1];
      alpha[i] = alpha[p] + axisW[i] * qdd[i - 1] + omega[p].cross(axisW[i] * qd[i - 1]);
      acc[i] = acc[p] + alpha[p].cross(r) + omega[p].cross(omega[p].cross(r));
    }
    const Vec3 c = tf[i].rotation * l.com;
    const Vec3 accCom = acc[i] + alpha[i].cross(c) + omega[i].cross(omega[i].cross(c));
    const Mat3 inertiaW = tf[i].rotation * l.inertia * tf[i].rotation.transpose();
    force[i] = l.mass * accCom;
    moment[i] = inertiaW * alpha[i] + omega[i].cross(inertiaW * omega[i]) + c.cross(force[i]);
  }

  std::vector<double> tau(n, 0.0);
  for (std::size_t i = nl - 1; i > 0; --i) {
    const auto p = static_cast<std::size_t>(m_links[i].parent);
    tau[i - 1] = axisW[i].dot(moment[i]);
    const Vec3 r = tf[i].position - tf[p].position;
    force[p] += force[i];
    moment[p] += moment[i] + r.cross(force[i]);
  }
  return tau;
}

Json KinematicTree::toJson() const {
  Json links = Json::array();
  for (const Link& l : m_links) {
    Json j;
    j["name"] = l.name;
    j["parent"] = l.parent < 0 ? Json(nullptr) : Json(m_links[static_cast<std::size_t>(l.parent)].name);
    j["mass"] = l.mass;
    j["com"] = vecJson(l.com);
    Json in = Json::array();
    for (int r = 0; r < 3; ++r) in.push_back({l.inertia(r, 0), l.inertia(r, 1), l.inertia(r, 2)});
    j["inertia"] = in;
    if (l.parent >= 0) {
      j["axis"] = vecJson(l.axis);
      j["origin"] = vecJson(l.origin);
      j["limits"] = {l.lower, l.upper};
    }
    links.push_back(std::move(j));
  }
  return {{"links", links}};
}

// ---------------------------------------------------------------------------
// RobotModel

RobotModel RobotModel::fromJson(const Json& doc) {
  schema::requireObject(doc, "");
  schema::onlyKeys(doc, {"schema_version", "name", "notes", "total_mass", "sole_offset", "hand_offset", "links"}, "");
  if (schema::integer(doc, "schema_version", "") != 1) throw SchemaError("schema_version", "unsupported version");
  const KinematicTree generic = KinematicTree::fromJson(doc);

  if (generic.jointCount() != kNumJoints)
    throw SchemaError("links", "expected " + std::to_string(kNumJoints) + " joints, found " + std::to_string(generic.jointCount()));

  // Re-order into model joint order; chains must hang parent-before-child.
  RobotModel m;
  m.m_tree.m_links.push_back(generic.m_links[0]);
  for (int j = 0; j < kNumJoints; ++j) {
    const std::string name(kJointNames[static_cast<std::size_t>(j)]);
    const int gi = generic.linkIndex(name);
    if (gi < 0) throw SchemaError("links", "missing joint link '" + name + "'");
    Link l = generic.m_links[static_cast<std::size_t>(gi)];
    const std::string& parentName = generic.m_links[static_cast<std::size_t>(l.parent)].name;
    l.parent = m.m_tree.linkIndex(parentName);
    if (l.parent < 0) throw SchemaError("links." + name + ".parent", "parent '" + parentName + "' must precede it in its chain");
    m.m_tree.m_links.push_back(std::move(l));
  }
  m.m_tree.m_totalMass = generic.m_totalMass;

  // Chain structure: each limb hangs off the trunk as a serial chain.
  const auto checkChain = [&](int first, int count) {
    for (int k = 0; k < count; ++k) {
      const Link& l = m.m_tree.m_links[static_cast<std::size_t>(first + k + 1)];
      const int expectedParent = k == 0 ? 0 : first + k;
      if (l.parent != expectedParent)
        throw SchemaError("links." + l.name + ".parent", "limb chain is not serial from the trunk");
    }
  };
  checkChain(idx(Joint::NeckYaw), 2);
  checkChain(armBase(Side::Left), 3);
  checkChain(armBase(Side::Right), 3);
  checkChain(legBase(Side::Left), 6);
  checkChain(legBase(Side::Right), 6);

  if (doc.contains("total_mass")) {
    const double declared = schema::number(doc, "total_mass", "");
    if (std::abs(declared - m.m_tree.m_totalMass) > 1e-6)
      throw SchemaError("total_mass", "declared total mass does not equal the sum of link masses");
  }

  // Closed-form leg IK needs intersecting hip and ankle axes and a straight
  // thigh/shank along -z in the zero pose.
  for (Side s : {Side::Left, Side::Right}) {
    const int b = legBase(s);
    const auto& L = m.m_tree.m_links;
    const auto link = [&](int j) -> const Link& { return L[static_cast<std::size_t>(b + j + 1)]; };
    const std::string side = s == Side::Left ? "l_" : "r_";
    const std::array<Vec3, 6> axes = {Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitY(), Vec3::UnitY(), Vec3::UnitX()};
    for (int j = 0; j < 6; ++j)
      if ((link(j).axis - axes[static_cast<std::size_t>(j)]).norm() > 1e-12)
        throw SchemaError("links." + link(j).name + ".axis", "unexpected leg joint axis");
    if (link(1).origin.norm() > 1e-12 || link(2).origin.norm() > 1e-12 || link(5).origin.norm() > 1e-12)
      throw SchemaError("links." + side + "hip_roll.origin", "hip and ankle joint axes must intersect");
    if (link(3).origin.head<2>().norm() > 1e-12 || link(4).origin.head<2>().norm() > 1e-12 || link(3).origin.z() >= 0 ||
        link(4).origin.z() >= 0)
      throw SchemaError("links." + side + "knee_pitch.origin", "thigh and shank must lie along -z");
    const double thigh = -link(3).origin.z(), shank = -link(4).origin.z();
    if (s == Side::Left) {
      m.m_thigh = thigh;
      m.m_shank = shank;
    } else if (std::abs(thigh - m.m_thigh) > 1e-12 || std::abs(shank - m.m_shank) > 1e-12) {
      throw SchemaError("links", "left and right leg segment lengths differ");
    }
  }

  m.m_soleOffset = doc.contains("sole_offset") ? schema::vec3(doc, "sole_offset", "") : Vec3::Zero();
  m.m_handOffset = doc.contains("hand_offset") ? schema::vec3(doc, "hand_offset", "") : Vec3::Zero();
  m.m_document = doc;
  return m;
}

RobotModel RobotModel::load(const std::filesystem::path& path) { return fromJson(readJsonFile(path)); }

Vec3 RobotModel::hipPosition(Side s) const { return m_tree.m_links[static_cast<std::size_t>(legBase(s) + 1)].origin; }

bool RobotModel::withinLimits(const JointPose& q, double tol) const {
  for (int j = 0; j < kNumJoints; ++j)
    if (q[j] < lowerLimit(j) - tol || q[j] > upperLimit(j) + tol) return false;
  return true;
}

JointPose RobotModel::clampToLimits(const JointPose& q, bool* clamped) const {
  JointPose out = q;
  bool any = false;
  for (int j = 0; j < kNumJoints; ++j) {
    out[j] = std::clamp(q[j], lowerLimit(j), upperLimit(j));
    any = any || out[j] != q[j];
  }
  if (clamped) *clamped = any;
  return out;
}

// ---------------------------------------------------------------------------
// Kinematics

std::map<std::string, Transform> forwardKinematics(const RobotModel& model, const JointPose& q) {
  const auto tf = model.tree().forward(q.span());
  std::map<std::string, Transform> out;
  for (std::size_t i = 0; i < tf.size(); ++i) out.emplace(model.tree().links()[i].name, tf[i]);
  return out;
}

EndEffectorPose solePose(const RobotModel& model, const JointPose& q, Side side) {
  const auto tf = model.tree().forward(q.span());
  const Transform& foot = tf[static_cast<std::size_t>(legBase(side) + 6)];
  return {foot.position + foot.rotation * model.soleOffset(), foot.orientation};
}

InversePose jointToInverse(const RobotModel& model, const JointPose& q) {
  const auto tf = model.tree().forward(q.span());
  InversePose out;
  for (Side s : {Side::Left, Side::Right}) {
    const auto i = static_cast<std::size_t>(s);
    const Transform& foot = tf[static_cast<std::size_t>(legBase(s) + 6)];
    out.legs[i] = {foot.position + foot.rotation * model.soleOffset(), foot.orientation};
    const Transform& forearm = tf[static_cast<std::size_t>(armBase(s) + 3)];
    out.arms[i] = {forearm.position + forearm.rotation * model.handOffset(), forearm.orientation};
  }
  return out;
}

// Abstract sagittal angles are positive forward (leg swung forward, toe up),
// i.e. the negative of a rotation about +y. The knee bend is split evenly
// between hip and ankle so the foot keeps its commanded angle.
JointPose abstractToJoint(const AbstractPose& a, const RobotModel&) {
  JointPose q;
  q[Joint::NeckYaw] = a.neckYaw;
  q[Joint::HeadPitch] = a.headPitch;
  for (Side s : {Side::Left, Side::Right}) {
    const AbstractLeg& leg = a.leg(s);
    if (!(leg.extension >= 0.0 && leg.extension <= 1.0)) throw InvalidArgument("leg extension must lie in [0, 1]");
    const double knee = 2.0 * std::acos(1.0 - leg.extension);
    const int b = legBase(s);
    q[b + 0] = leg.angleZ;
    q[b + 1] = leg.angleX;
    q[b + 2] = -leg.angleY - 0.5 * knee;
    q[b + 3] = knee;
    q[b + 4] = leg.angleY - leg.footAngleY - 0.5 * knee;
    q[b + 5] = leg.footAngleX - leg.angleX;

    const AbstractArm& arm = a.arm(s);
    if (!(arm.extension >= 0.0 && arm.extension <= 1.0)) throw InvalidArgument("arm extension must lie in [0, 1]");
    const double elbow = 2.0 * std::acos(1.0 - arm.extension);
    const int ab = armBase(s);
    q[ab + 0] = -arm.angleY + 0.5 * elbow;
    q[ab + 1] = arm.angleX;
    q[ab + 2] = -elbow;
  }
  return q;
}

AbstractPose jointToAbstract(const JointPose& q, const RobotModel&) {
  AbstractPose a;
  a.neckYaw = q[Joint::NeckYaw];
  a.headPitch = q[Joint::HeadPitch];
  for (Side s : {Side::Left, Side::Right}) {
    const int b = legBase(s);
    const double knee = q[b + 3];
    if (knee < 0.0 || knee > kPi) throw InvalidArgument("knee angle outside [0, pi] (hyperextension)");
    AbstractLeg& leg = a.leg(s);
    leg.extension = 1.0 - std::cos(0.5 * knee);
    leg.angleZ = q[b + 0];
    leg.angleX = q[b + 1];
    leg.angleY = -(q[b + 2] + 0.5 * knee);
    leg.footAngleY = leg.angleY - q[b + 4] - 0.5 * knee;
    leg.footAngleX = q[b + 5] + leg.angleX;

    const int ab = armBase(s);
    const double elbow = -q[ab + 2];
    if (elbow < 0.0 || elbow > kPi) throw InvalidArgument("elbow angle outside [-pi, 0] (hyperextension)");
    AbstractArm& arm = a.arm(s);
    arm.extension = 1.0 - std::cos(0.5 * elbow);
    arm.angleY = 0.5 * elbow - q[ab + 0];
    arm.angleX = q[ab + 1];
  }
  return a;
}

std::array<double, 6> legInverseKinematics(const EndEffectorPose& sole, Side side, const RobotModel& model) {
  const double lt = model.thighLength(), ls = model.shankLength();
  const Mat3 footRot = sole.orientation.toMatrix();
  const Vec3 ankle = sole.position - footRot * model.soleOffset();
  const Vec3 u = footRot.transpose() * (ankle - model.hipPosition(side));

  const double d = u.norm();
  if (d > lt + ls + 1e-12) throw UnreachableError("leg target out of reach", d - (lt + ls));
  if (d < std::abs(lt - ls) - 1e-12) throw UnreachableError("leg target inside the minimum reach", std::abs(lt - ls) - d);

  const double cosKnee = std::clamp((d * d - lt * lt - ls * ls) / (2.0 * lt * ls), -1.0, 1.0);
  const double knee = std::acos(cosKnee);
  const double cx = lt * std::sin(knee), cz = -lt * std::cos(knee) - ls;
  const int b = legBase(side);

  // Two ankle roll branches differ by pi; a strongly bent leg can put the hip below the ankle in the foot frame.
  const auto solve = [&](bool flipped) {
    const double r = std::hypot(u.y(), u.z());
    const double ankleRoll = flipped ? std::atan2(u.y(), u.z()) : std::atan2(-u.y(), -u.z());
    const double wz = flipped ? r : -r;
    const double anklePitch = wrapAngle(std::atan2(-cx, -cz) - std::atan2(-u.x(), -wz));
    const Mat3 hip = footRot * Eigen::AngleAxisd(-ankleRoll, Vec3::UnitX()).toRotationMatrix() *
                     Eigen::AngleAxisd(-(knee + anklePitch), Vec3::UnitY()).toRotationMatrix();
    const double hipRoll = std::asin(std::clamp(hip(2, 1), -1.0, 1.0));
    const double hipPitch = std::atan2(-hip(2, 0), hip(2, 2));
    const double hipYaw = std::atan2(-hip(0, 1), hip(1, 1));
    return std::array<double, 6>{hipYaw, hipRoll, hipPitch, knee, anklePitch, ankleRoll};
  };
  const auto violation = [&](const std::array<double, 6>& q) {
    double v = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double x = q[static_cast<std::size_t>(k)];
      v += std::max(0.0, model.lowerLimit(b + k) - x) + std::max(0.0, x - model.upperLimit(b + k));
    }
    return v;
  };
  const auto primary = solve(false);
  const auto alternate = solve(true);
  return violation(alternate) < violation(primary) ? alternate : primary;
}

std::array<double, kNumJoints> inverseDynamics(const RobotModel& model, const JointPose& q, const JointPose& qd,
                                               const JointPose& qdd, const Vec3& gravity) {
  const auto tau = model.tree().inverseDynamics(q.span(), qd.span(), qdd.span(), gravity);
  std::array<double, kNumJoints> out{};
  std::copy(tau.begin(), tau.end(), out.begin());
  return out;
}

}  // namespace hop
