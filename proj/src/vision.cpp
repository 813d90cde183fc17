#include "hop/vision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hop/errors.hpp"

namespace hop {

CameraModel CameraModel::defaults() {
  CameraModel cam;
  cam.fx = cam.fy = 0.5 * cam.width / radialDistort(cam, cam.ratedHalfFov);
  Mat3 r;
  r.col(0) = Vec3(0, -1, 0);
  r.col(1) = Vec3(0, 0, -1);
  r.col(2) = Vec3(1, 0, 0);
  cam.orientation = RotationQuat::fromMatrix(r);
  return cam;
}

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw ModelInvalidError("image size must be positive");
  if (!(fx > 0.0) || !(fy > 0.0)) throw ModelInvalidError("focal lengths must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw ModelInvalidError("principal point must be finite");
  for (double c : k)
    if (!std::isfinite(c)) throw ModelInvalidError("distortion coefficients must be finite");
  if (!(ratedHalfFov > 0.0) || maxAngle() > kPi) throw ModelInvalidError("rated field of view out of range");
  if (!radialMonotonic(*this, maxAngle())) throw ModelInvalidError("radial distortion is not monotonic over the rated field of view");
}

Json CameraModel::toJson() const {
  return {{"width", width},
          {"height", height},
          {"fx", fx},
          {"fy", fy},
          {"cx", cx},
          {"cy", cy},
          {"k", std::vector<double>(k.begin(), k.end())},
          {"rated_half_fov", ratedHalfFov},
          {"position", {position.x(), position.y(), position.z()}},
          {"orientation", {orientation.w(), orientation.x(), orientation.y(), orientation.z()}}};
}

CameraModel CameraModel::fromJson(const Json& doc, const std::string& path) {
  schema::onlyKeys(doc, {"width", "height", "fx", "fy", "cx", "cy", "k", "rated_half_fov", "position", "orientation", "notes"},
                   path);
  CameraModel cam;
  cam.width = schema::integer(doc, "width", path);
  cam.height = schema::integer(doc, "height", path);
  cam.fx = schema::number(doc, "fx", path);
  cam.fy = schema::number(doc, "fy", path);
  cam.cx = schema::number(doc, "cx", path);
  cam.cy = schema::number(doc, "cy", path);
  const auto k = schema::numbers(doc, "k", 4, path);
  std::copy(k.begin(), k.end(), cam.k.begin());
  cam.ratedHalfFov = schema::numberOr(doc, "rated_half_fov", cam.ratedHalfFov, path);
  cam.position = schema::vec3(doc, "position", path);
  const auto q = schema::numbers(doc, "orientation", 4, path);
  try {
    cam.orientation = RotationQuat(q[0], q[1], q[2], q[3]);
  } catch (const InvalidArgument& e) {
    throw SchemaError(path + ".orientation", e.what());
  }
  try {
    cam.validate();
  } catch (const ModelInvalidError& e) {
    throw SchemaError(path, e.what());
  }
  return cam;
}

double radialDistort(const CameraModel& cam, double theta) {
  const double t2 = theta * theta;
  return theta * (1.0 + t2 * (cam.k[0] + t2 * (cam.k[1] + t2 * (cam.k[2] + t2 * cam.k[3]))));
}

double radialDerivative(const CameraModel& cam, double theta) {
  const double t2 = theta * theta;
  return 1.0 + t2 * (3.0 * cam.k[0] + t2 * (5.0 * cam.k[1] + t2 * (7.0 * cam.k[2] + t2 * 9.0 * cam.k[3])));
}

bool radialMonotonic(const CameraModel& cam, double thetaMax) {
  const int n = static_cast<int>(std::ceil(thetaMax / 1e-3));
  double prev = radialDistort(cam, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double theta = std::min(i * 1e-3, thetaMax);
    if (!(radialDerivative(cam, theta) > 0.0)) return false;
    const double cur = radialDistort(cam, theta);
    if (i > 0 && !(cur > prev)) return false;
    prev = cur;
  }
  return true;
}

Pixel distortPoint(const Vec3& ray, const CameraModel& cam) {
  const double n = ray.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("ray must be a finite non-zero vector");
  const Vec3 r = ray / n;
  const double rho = std::hypot(r.x(), r.y());
  const double theta = std::atan2(rho, r.z());
  if (theta >= cam.maxAngle()) throw OutOfViewError("ray lies outside the rated field of view");
  if (rho == 0.0) return {cam.cx, cam.cy};
  const double td = radialDistort(cam, theta);
  return {cam.cx + cam.fx * td * r.x() / rho, cam.cy + cam.fy * td * r.y() / rho};
}

namespace {

// Newton-Raphson on theta_d(theta) = td, starting from theta = td.
double invertRadial(const CameraModel& cam, double td, const Pixel& px, int* iterations) {
  double theta = td;
  for (int i = 0; i <= 20; ++i) {
    const double residual = radialDistort(cam, theta) - td;
    if (std::abs(residual) <= 1e-10) {
      if (iterations) *iterations = i;
      return theta;
    }
    if (i == 20) throw NumericalError("Newton-Raphson did not converge", px.u, px.v, residual);
    const double slope = radialDerivative(cam, theta);
    if (!(slope > 0.0)) throw NumericalError("radial function is not monotonic here", px.u, px.v, residual);
    theta -= residual / slope;
  }
  return theta;
}

}  // namespace

UndistortResult undistortPixelDetailed(const Pixel& px, const CameraModel& cam) {
  if (!std::isfinite(px.u) || !std::isfinite(px.v)) throw InvalidArgument("pixel must be finite");
  const double mx = (px.u - cam.cx) / cam.fx;
  const double my = (px.v - cam.cy) / cam.fy;
  const double td = std::hypot(mx, my);
  UndistortResult out;
  if (td == 0.0) {
    out.ray = Vec3(0, 0, 1);
    return out;
  }
  const double theta = invertRadial(cam, td, px, &out.iterations);
  const double s = std::sin(theta) / td;
  out.ray = Vec3(s * mx, s * my, std::cos(theta));
  return out;
}

Vec3 undistortPixel(const Pixel& px, const CameraModel& cam) { return undistortPixelDetailed(px, cam).ray; }

Pixel idealFromDistorted(const Pixel& px, const CameraModel& cam) {
  const double mx = (px.u - cam.cx) / cam.fx;
  const double my = (px.v - cam.cy) / cam.fy;
  const double td = std::hypot(mx, my);
  if (td == 0.0) return {cam.cx, cam.cy};
  const double scale = invertRadial(cam, td, px, nullptr) / td;
  return {cam.cx + cam.fx * mx * scale, cam.cy + cam.fy * my * scale};
}

Pixel distortedFromIdeal(const Pixel& ideal, const CameraModel& cam) {
  const double mx = (ideal.u - cam.cx) / cam.fx;
  const double my = (ideal.v - cam.cy) / cam.fy;
  const double theta = std::hypot(mx, my);
  if (theta == 0.0) return {cam.cx, cam.cy};
  const double scale = radialDistort(cam, theta) / theta;
  return {cam.cx + cam.fx * mx * scale, cam.cy + cam.fy * my * scale};
}

GridMap::GridMap(double x0, double y0, double stride, int nx, int ny)
    : m_x0(x0), m_y0(y0), m_stride(stride), m_nx(nx), m_ny(ny),
      m_values(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
  if (!(stride > 0.0) || nx < 2 || ny < 2) throw InvalidArgument("grid needs a positive stride and at least 2x2 nodes");
}

void GridMap::set(int ix, int iy, const Pixel& value) {
  m_values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(m_nx) + static_cast<std::size_t>(ix)] = value;
}

Pixel GridMap::lookup(const Pixel& p) const {
  const double gx = (p.u - m_x0) / m_stride;
  const double gy = (p.v - m_y0) / m_stride;
  if (!(gx >= 0.0 && gy >= 0.0 && gx <= m_nx - 1 && gy <= m_ny - 1)) throw OutOfViewError("lookup outside the table");
  const int ix = std::min(static_cast<int>(gx), m_nx - 2);
  const int iy = std::min(static_cast<int>(gy), m_ny - 2);
  const double tx = gx - ix, ty = gy - iy;
  const auto at = [&](int x, int y) -> const Pixel& {
    return m_values[static_cast<std::size_t>(y) * static_cast<std::size_t>(m_nx) + static_cast<std::size_t>(x)];
  };
  const Pixel& a = at(ix, iy);
  const Pixel& b = at(ix + 1, iy);
  const Pixel& c = at(ix, iy + 1);
  const Pixel& d = at(ix + 1, iy + 1);
  if (tx == 0.0 && ty == 0.0) return a;
  const double w00 = (1 - tx) * (1 - ty), w10 = tx * (1 - ty), w01 = (1 - tx) * ty, w11 = tx * ty;
  return {w00 * a.u + w10 * b.u + w01 * c.u + w11 * d.u, w00 * a.v + w10 * b.v + w01 * c.v + w11 * d.v};
}

namespace {

GridMap sampleGrid(double x0, double y0, double x1, double y1, double stride,
                   const std::function<Pixel(const Pixel&)>& f) {
  const int nx = std::max(2, static_cast<int>(std::ceil((x1 - x0) / stride - 1e-9)) + 1);
  const int ny = std::max(2, static_cast<int>(std::ceil((y1 - y0) / stride - 1e-9)) + 1);
  GridMap grid(x0, y0, stride, nx, ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) grid.set(ix, iy, f({x0 + ix * stride, y0 + iy * stride}));
  return grid;
}

}  // namespace

ProjectionLUT buildLUTs(const CameraModel& cam, double stride) {
  if (!(stride > 0.0)) throw InvalidArgument("stride must be positive");
  cam.validate();

  // The image corners set the largest angle the tables must cover.
  const double w = cam.width, h = cam.height;
  double thetaMax = 0.0;
  double ix0 = cam.cx, iy0 = cam.cy, ix1 = cam.cx, iy1 = cam.cy;
  const double radialLimit = radialDistort(cam, kPi);
  for (const Pixel& corner : {Pixel{0, 0}, Pixel{w, 0}, Pixel{0, h}, Pixel{w, h}}) {
    const double td = std::hypot((corner.u - cam.cx) / cam.fx, (corner.v - cam.cy) / cam.fy);
    if (td >= radialLimit) throw ModelInvalidError("image corners lie beyond the invertible range of the lens model");
    // Bracket by bisection first so the monotonicity check below sees the full range.
    double lo = 0.0, hi = kPi;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (radialDistort(cam, mid) < td ? lo : hi) = mid;
    }
    thetaMax = std::max(thetaMax, hi);
  }
  if (!radialMonotonic(cam, thetaMax)) throw ModelInvalidError("radial distortion is not monotonic over the image");
  // The ideal footprint of the image is bounded by the image of its border.
  std::vector<Pixel> border;
  for (double u = 0.0; u <= w; u += 1.0) border.insert(border.end(), {Pixel{u, 0}, Pixel{u, h}});
  for (double v = 0.0; v <= h; v += 1.0) border.insert(border.end(), {Pixel{0, v}, Pixel{w, v}});
  for (const Pixel& b : border) {
    const Pixel ideal = idealFromDistorted(b, cam);
    ix0 = std::min(ix0, ideal.u);
    iy0 = std::min(iy0, ideal.v);
    ix1 = std::max(ix1, ideal.u);
    iy1 = std::max(iy1, ideal.v);
  }

  ProjectionLUT lut;
  lut.stride = stride;
  lut.undistort = sampleGrid(0.0, 0.0, w, h, stride, [&](const Pixel& p) { return idealFromDistorted(p, cam); });
  ix0 = std::floor(ix0), iy0 = std::floor(iy0);
  lut.distort = sampleGrid(ix0, iy0, std::ceil(ix1), std::ceil(iy1), stride,
                           [&](const Pixel& p) { return distortedFromIdeal(p, cam); });
  return lut;
}

namespace {

struct CameraInTrunk {
  Vec3 origin;
  Mat3 rotation;
};

CameraInTrunk cameraPose(const ViewContext& ctx, const CameraModel& cam, const Mat3& trunkRotation) {
  const Vec3 headPos = ctx.head.position;
  const Mat3 headRot = ctx.head.orientation.toMatrix();
  const Vec3 camTrunk = headPos + headRot * cam.position;
  return {trunkRotation * camTrunk + Vec3(0, 0, ctx.trunkHeight),
          trunkRotation * headRot * cam.orientation.toMatrix()};
}

}  // namespace

std::array<double, 2> projectToGround(const Pixel& px, const ViewContext& ctx, const CameraModel& cam) {
  const Vec3 ray = undistortPixel(px, cam);
  const CameraInTrunk pose = cameraPose(ctx, cam, quatFromFused(ctx.trunk).toMatrix());
  const Vec3 d = pose.rotation * ray;
  if (pose.origin.z() <= 0.0) throw NoIntersectionError("camera is not above the ground plane");
  if (d.z() >= 0.0) throw NoIntersectionError("ray does not point below the horizon");
  const double s = -pose.origin.z() / d.z();
  const Vec3 hit = pose.origin + s * d;
  return {hit.x(), hit.y()};
}

Pixel groundToPixel(const std::array<double, 2>& ground, const ViewContext& ctx, const CameraModel& cam) {
  const CameraInTrunk pose = cameraPose(ctx, cam, quatFromFused(ctx.trunk).toMatrix());
  const Vec3 world(ground[0], ground[1], 0.0);
  const Vec3 ray = pose.rotation.transpose() * (world - pose.origin);
  return distortPoint(ray, cam);
}

NelderMeadResult nelderMead(const std::function<double(const std::vector<double>&)>& objective,
                            const std::vector<double>& x0, const NelderMeadConfig& cfg) {
  const std::size_t n = x0.size();
  if (n == 0) throw InvalidArgument("nelderMead needs at least one dimension");
  for (double v : x0)
    if (!std::isfinite(v)) throw InvalidArgument("nelderMead start point must be finite");
  if (!cfg.initialStep.empty() && cfg.initialStep.size() != n) throw InvalidArgument("initialStep size mismatch");

  const auto eval = [&](const std::vector<double>& x) {
    const double f = objective(x);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "objective is not finite at [";
      for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
      os << "]";
      throw OptimizationError(os.str());
    }
    return f;
  };

  NelderMeadResult result;
  if (cfg.maxIter <= 0) {
    result.x = x0;
    result.value = eval(x0);
    return result;
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += cfg.initialStep.empty() ? 0.1 : cfg.initialStep[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  const auto sortSimplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = simplex[order[i]];
      v[i] = values[order[i]];
    }
    simplex.swap(s);
    values.swap(v);
  };
  const auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += (simplex[i][j] - simplex[0][j]) * (simplex[i][j] - simplex[0][j]);
      d = std::max(d, std::sqrt(s));
    }
    return d;
  };
  const auto along = [&](const std::vector<double>& c, const std::vector<double>& worst, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (c[j] - worst[j]);
    return x;
  };

  sortSimplex();
  int iter = 0;
  while (iter < cfg.maxIter && diameter() >= cfg.tol) {
    ++iter;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    const std::vector<double>& worst = simplex[n];

    const auto xr = along(centroid, worst, cfg.reflection);
    const double fr = eval(xr);
    if (fr < values[0]) {
      const auto xe = along(centroid, worst, cfg.reflection * cfg.expansion);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        values[n] = fe;
      } else {
        simplex[n] = xr;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = xr;
      values[n] = fr;
    } else {
      bool accepted = false;
      if (fr < values[n]) {
        const auto xc = along(centroid, worst, cfg.reflection * cfg.contraction);
        const double fc = eval(xc);
        if (fc <= fr) {
          simplex[n] = xc;
          values[n] = fc;
          accepted = true;
        }
      } else {
        const auto xc = along(centroid, worst, -cfg.contraction);
        const double fc = eval(xc);
        if (fc < values[n]) {
          simplex[n] = xc;
          values[n] = fc;
          accepted = true;
        }
      }
      if (!accepted) {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + cfg.shrink * (simplex[i][j] - simplex[0][j]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sortSimplex();
  }
  result.x = simplex[0];
  result.value = values[0];
  result.iterations = iter;
  return result;
}

namespace {

CameraModel withOffset(const CameraModel& base, const std::vector<double>& p) {
  CameraModel cam = base;
  cam.position = base.position + Vec3(p[0], p[1], p[2]);
  FusedAngles f;
  f.yaw = p[3];
  f.pitch = std::clamp(p[4], -1.5, 1.5);
  f.roll = std::clamp(p[5], -1.5, 1.5);
  const double s = std::sin(f.pitch) * std::sin(f.pitch) + std::sin(f.roll) * std::sin(f.roll);
  if (s > 1.0) {
    const double scale = 1.0 / std::sqrt(s);
    f.pitch = std::asin(std::sin(f.pitch) * scale);
    f.roll = std::asin(std::sin(f.roll) * scale);
  }
  cam.orientation = base.orientation * quatFromFused(f);
  return cam;
}

double meanSquaredError(const std::vector<Correspondence>& pts, const CameraModel& cam, const ViewContext& ctx) {
  constexpr double kPenalty = 1e6;  // px^2 charged for a point the camera cannot see
  double sum = 0.0;
  for (const Correspondence& c : pts) {
    try {
      const Pixel p = groundToPixel(c.world, ctx, cam);
      const double du = p.u - c.pixel.u, dv = p.v - c.pixel.v;
      sum += du * du + dv * dv;
    } catch (const OutOfViewError&) {
      sum += kPenalty;
    }
  }
  return sum / static_cast<double>(pts.size());
}

}  // namespace

CalibrationResult calibrateExtrinsics(const std::vector<Correspondence>& pts, const CameraModel& initial,
                                      const ViewContext& ctx) {
  if (pts.size() < 4) throw CalibrationError("at least 4 correspondences are required");
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& c : pts) mean += Eigen::Vector2d(c.world[0], c.world[1]);
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& c : pts) {
    const Eigen::Vector2d d = Eigen::Vector2d(c.world[0], c.world[1]) - mean;
    cov += d * d.transpose();
  }
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues();
  if (!(ev[1] > 0.0) || ev[0] <= 1e-9 * ev[1]) throw CalibrationError("correspondences are collinear");

  const auto objective = [&](const std::vector<double>& p) { return meanSquaredError(pts, withOffset(initial, p), ctx); };

  CalibrationResult out;
  std::vector<double> x(6, 0.0);
  double best = objective(x);
  out.initialRms = std::sqrt(best);

  NelderMeadConfig cfg;
  cfg.tol = 1e-9;
  cfg.maxIter = 4000;
  cfg.initialStep = {0.01, 0.01, 0.01, 0.02, 0.02, 0.02};
  // Restarting from the best vertex recovers from simplex collapse.
  for (int round = 0; round < 8; ++round) {
    const NelderMeadResult r = nelderMead(objective, x, cfg);
    out.iterations += r.iterations;
    const bool improved = r.value < best * (1.0 - 1e-12);
    if (r.value <= best) {
      x = r.x;
      best = r.value;
    }
    if (!improved) break;
    for (double& s : cfg.initialStep) s *= 0.5;
  }
  const CameraModel cam = withOffset(initial, x);
  out.position = cam.position;
  out.orientation = cam.orientation;
  out.rms = std::sqrt(best);
  return out;
}

std::vector<Correspondence> parseCorrespondenceCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("line 1", "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "world_x,world_y,pixel_u,pixel_v") throw SchemaError("line 1", "expected header world_x,world_y,pixel_u,pixel_v");
  std::vector<Correspondence> out;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 4> v{};
    std::istringstream fields(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(fields, cell, ',')) {
      if (n >= 4) throw SchemaError("line " + std::to_string(lineNo), "expected 4 columns");
      try {
        std::size_t used = 0;
        v[n] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw SchemaError("line " + std::to_string(lineNo), "not a number: " + cell);
      }
      ++n;
    }
    if (n != 4) throw SchemaError("line " + std::to_string(lineNo), "expected 4 columns");
    out.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return out;
}

std::vector<Correspondence> readCorrespondenceCsv(const std::filesystem::path& path) {
  return parseCorrespondenceCsv(readTextFile(path));
}

ViewContext CameraFile::context(const RobotModel& model) const {
  JointPose q;
  q[Joint::NeckYaw] = headJoints[0];
  q[Joint::HeadPitch] = headJoints[1];
  ViewContext ctx;
  ctx.head = forwardKinematics(model, q).at("head_pitch");
  ctx.trunk = trunk;
  ctx.trunkHeight = trunkHeight;
  return ctx;
}

Json CameraFile::toJson() const {
  return {{"schema_version", 1},
          {"camera", camera.toJson()},
          {"view",
           {{"head_joints", {headJoints[0], headJoints[1]}},
            {"trunk_fused", {trunk.yaw, trunk.pitch, trunk.roll, trunk.hemisphere}},
            {"trunk_height", trunkHeight}}}};
}

CameraFile CameraFile::fromJson(const Json& doc) {
  schema::onlyKeys(doc, {"schema_version", "camera", "view", "notes"}, "");
  if (schema::integer(doc, "schema_version", "") != 1) throw SchemaError("schema_version", "unsupported version");
  CameraFile f;
  f.camera = CameraModel::fromJson(schema::field(doc, "camera", ""), "camera");
  if (doc.contains("view")) {
    const Json& view = doc["view"];
    schema::onlyKeys(view, {"head_joints", "trunk_fused", "trunk_height"}, "view");
    const auto hj = schema::numbers(view, "head_joints", 2, "view");
    f.headJoints = {hj[0], hj[1]};
    const auto tf = schema::numbers(view, "trunk_fused", 4, "view");
    f.trunk = {tf[0], tf[1], tf[2], tf[3] < 0 ? -1 : 1};
    if (!f.trunk.valid()) throw SchemaError("view.trunk_fused", "invalid fused angles");
    f.trunkHeight = schema::number(view, "trunk_height", "view");
  }
  return f;
}

CameraFile CameraFile::load(const std::filesystem::path& path) { return fromJson(readJsonFile(path)); }

}  // namespace hop
