#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "hop/json_io.hpp"
#include "hop/orientation.hpp"
#include "hop/robot_model.hpp"

namespace hop {

struct Pixel {
  double u = 0.0, v = 0.0;
};

// Camera frame: z along the optical axis, x to the image right, y down.
struct CameraModel {
  int width = 640;
  int height = 480;
  double fx = 0.0, fy = 0.0;
  double cx = 320.0, cy = 240.0;
  std::array<double, 4> k{-0.06, 0.003, 0.0, 0.0};
  double ratedHalfFov = 75.0 * kPi / 180.0;
  // Pose of the camera in the head link frame.
  Vec3 position{0.05, 0.0, 0.05};
  RotationQuat orientation;

  // Synthetic default: 75 deg off-axis maps to the half image width.
  static CameraModel defaults();

  // Largest off-axis angle accepted by distortPoint (rated half FOV x 1.2).
  double maxAngle() const { return 1.2 * ratedHalfFov; }

  // Throws ModelInvalidError on bad intrinsics or a non-monotonic radial
  // function below maxAngle().
  void validate() const;

  Json toJson() const;
  static CameraModel fromJson(const Json& doc, const std::string& path = "camera");
};

// theta -> theta * (1 + k1 theta^2 + k2 theta^4 + k3 theta^6 + k4 theta^8)
double radialDistort(const CameraModel& cam, double theta);
double radialDerivative(const CameraModel& cam, double theta);

// Checks d(theta_d)/d(theta) > 0 on a 1e-3 rad grid over [0, thetaMax].
bool radialMonotonic(const CameraModel& cam, double thetaMax);

Pixel distortPoint(const Vec3& ray, const CameraModel& cam);

struct UndistortResult {
  Vec3 ray;
  int iterations = 0;
};
UndistortResult undistortPixelDetailed(const Pixel& px, const CameraModel& cam);
Vec3 undistortPixel(const Pixel& px, const CameraModel& cam);

// Ideal (equidistant, undistorted) pixel coordinates: radius fx * theta.
Pixel idealFromDistorted(const Pixel& px, const CameraModel& cam);
Pixel distortedFromIdeal(const Pixel& ideal, const CameraModel& cam);

// Regular grid of 2-vectors sampled over [x0, x0 + (nx-1) stride] x [...].
class GridMap {
 public:
  GridMap() = default;
  GridMap(double x0, double y0, double stride, int nx, int ny);
  void set(int ix, int iy, const Pixel& value);
  Pixel lookup(const Pixel& p) const;  // bilinear; OutOfViewError outside the grid
  int nodeCount() const { return m_nx * m_ny; }
  double x0() const { return m_x0; }
  double y0() const { return m_y0; }
  double x1() const { return m_x0 + (m_nx - 1) * m_stride; }
  double y1() const { return m_y0 + (m_ny - 1) * m_stride; }

 private:
  double m_x0 = 0.0, m_y0 = 0.0, m_stride = 1.0;
  int m_nx = 0, m_ny = 0;
  std::vector<Pixel> m_values;
};

struct ProjectionLUT {
  double stride = 1.0;
  GridMap undistort;  // distorted pixel -> ideal pixel, covers the image
  GridMap distort;    // ideal pixel -> distorted pixel, covers the image's ideal footprint

  Pixel toIdeal(const Pixel& px) const { return undistort.lookup(px); }
  Pixel toDistorted(const Pixel& ideal) const { return distort.lookup(ideal); }
};

ProjectionLUT buildLUTs(const CameraModel& cam, double stride);

// Ground plane context for the head camera.
struct ViewContext {
  Transform head;          // head link in the trunk frame (from forwardKinematics)
  FusedAngles trunk;       // trunk attitude
  double trunkHeight = 0.0;  // m, trunk origin above the ground
};

// Ground point (x, y) in the frame located below the trunk origin whose axes
// are those of the world frame the trunk attitude is expressed in.
std::array<double, 2> projectToGround(const Pixel& px, const ViewContext& ctx, const CameraModel& cam);
Pixel groundToPixel(const std::array<double, 2>& ground, const ViewContext& ctx, const CameraModel& cam);

struct NelderMeadConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double tol = 1e-10;
  int maxIter = 5000;
  std::vector<double> initialStep;  // per coordinate; empty means 0.1 each
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

NelderMeadResult nelderMead(const std::function<double(const std::vector<double>&)>& objective,
                            const std::vector<double>& x0, const NelderMeadConfig& config = {});

struct Correspondence {
  std::array<double, 2> world;
  Pixel pixel;
};

struct CalibrationResult {
  Vec3 position;
  RotationQuat orientation;
  double initialRms = 0.0;
  double rms = 0.0;  // px
  int iterations = 0;
};

// Optimizes the camera pose in the head frame. `initial` supplies intrinsics
// and the starting extrinsic.
CalibrationResult calibrateExtrinsics(const std::vector<Correspondence>& points, const CameraModel& initial,
                                      const ViewContext& ctx);

std::vector<Correspondence> parseCorrespondenceCsv(const std::string& text);
std::vector<Correspondence> readCorrespondenceCsv(const std::filesystem::path& path);

// Head transform, trunk attitude and height stored with a camera file.
struct CameraFile {
  CameraModel camera;
  std::array<double, 2> headJoints{0.0, 0.0};  // neck_yaw, head_pitch
  FusedAngles trunk;
  double trunkHeight = 0.0;

  ViewContext context(const RobotModel& model) const;
  Json toJson() const;
  static CameraFile fromJson(const Json& doc);
  static CameraFile load(const std::filesystem::path& path);
};

}  // namespace hop
