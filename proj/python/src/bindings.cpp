#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hop/errors.hpp"
#include "hop/motion.hpp"
#include "hop/orientation.hpp"
#include "hop/runtime.hpp"
#include "hop/servo.hpp"
#include "hop/sim.hpp"
#include "hop/vision.hpp"

namespace py = pybind11;
using namespace hop;

namespace {

std::array<double, 4> quatTuple(const RotationQuat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the hop humanoid control library";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  m.def(
      "fused_from_quat",
      [](double w, double x, double y, double z) {
        const FusedAngles f = fusedFromQuat(RotationQuat(w, x, y, z));
        return py::make_tuple(f.yaw, f.pitch, f.roll, f.hemisphere);
      },
      py::arg("w"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "quat_from_fused",
      [](double yaw, double pitch, double roll, int hemisphere) {
        return quatTuple(quatFromFused({yaw, pitch, roll, hemisphere}));
      },
      py::arg("yaw"), py::arg("pitch"), py::arg("roll"), py::arg("hemisphere") = 1);
  m.def("wrap_angle", &wrapAngle);

  m.def(
      "angle_to_ticks",
      [](double angle, int offset, int direction) {
        JointCalibration cal;
        cal.tickOffset = offset;
        cal.direction = direction;
        const TickResult r = angleToTicks(angle, cal);
        return py::make_tuple(r.ticks, r.clamped);
      },
      py::arg("angle"), py::arg("offset") = 2048, py::arg("direction") = 1);
  m.def(
      "ticks_to_angle",
      [](int ticks, int offset, int direction) {
        JointCalibration cal;
        cal.tickOffset = offset;
        cal.direction = direction;
        return ticksToAngle(ticks, cal);
      },
      py::arg("ticks"), py::arg("offset") = 2048, py::arg("direction") = 1);

  m.def("distort_point", [](double x, double y, double z) {
    const Pixel p = distortPoint(Vec3(x, y, z), CameraModel::defaults());
    return py::make_tuple(p.u, p.v);
  });
  m.def("undistort_pixel", [](double u, double v) {
    const Vec3 r = undistortPixel({u, v}, CameraModel::defaults());
    return std::array<double, 3>{r.x(), r.y(), r.z()};
  });

  m.def(
      "interpolate_motion",
      [](const std::filesystem::path& path, double t) {
        const MotionFrame f = interpolate(loadMotion(path), t);
        py::dict d;
        d["pos"] = f.positions;
        d["vel"] = f.velocities;
        d["eff"] = f.efforts;
        d["sup"] = py::make_tuple(f.support.left, f.support.right);
        return d;
      },
      py::arg("path"), py::arg("t"));

  m.def(
      "run_scenario",
      [](const std::filesystem::path& scenario, const std::filesystem::path& dataDir) {
        const SimResources res = RuntimeConfig::defaults(dataDir).loadResources();
        RunSummary s;
        std::string log;
        {
          py::gil_scoped_release release;
          log = runScenarioLog(Scenario::load(scenario), res, &s);
        }
        py::dict d;
        d["ticks"] = s.ticks;
        d["motion_completed"] = s.motionCompleted;
        d["rms_tilt_error"] = s.rmsTiltError;
        d["final_tilt_error"] = s.finalTiltError;
        return py::make_tuple(log, d);
      },
      py::arg("scenario"), py::arg("data_dir"));
}
