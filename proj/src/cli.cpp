#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "hop/errors.hpp"
#include "hop/runtime.hpp"
#include "hop/vision.hpp"

#ifndef HOP_DEFAULT_DATA_DIR
#define HOP_DEFAULT_DATA_DIR "data"
#endif

namespace hop {
namespace fs = std::filesystem;

namespace {

std::string fusedLine(const FusedAngles& f) {
  return formatNumber(f.yaw) + " " + formatNumber(f.pitch) + " " + formatNumber(f.roll) + " " +
         (f.hemisphere > 0 ? "+1" : "-1");
}

int convertOrientation(const std::string& kind, const std::vector<double>& v, std::ostream& out, std::ostream& err) {
  if (kind == "quat") {
    if (v.size() != 4) {
      err << "convert-orientation quat expects 4 values: w x y z\n";
      return 1;
    }
    out << fusedLine(fusedFromQuat(RotationQuat(v[0], v[1], v[2], v[3]))) << "\n";
    return 0;
  }
  if (kind == "fused") {
    if (v.size() != 3 && v.size() != 4) {
      err << "convert-orientation fused expects 3 or 4 values: yaw pitch roll [hemisphere]\n";
      return 1;
    }
    FusedAngles f{v[0], v[1], v[2], 1};
    if (v.size() == 4) {
      if (v[3] != 1.0 && v[3] != -1.0) {
        err << "hemisphere must be +1 or -1\n";
        return 1;
      }
      f.hemisphere = v[3] > 0 ? 1 : -1;
    }
    const RotationQuat q = quatFromFused(f);
    out << formatNumber(q.w()) << " " << formatNumber(q.x()) << " " << formatNumber(q.y()) << " "
        << formatNumber(q.z()) << "\n";
    return 0;
  }
  err << "convert-orientation: unknown representation '" << kind << "' (expected quat or fused)\n";
  return 1;
}

void writeLogWithMeta(const fs::path& out, const std::string& log, const Json& meta) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  writeFileAtomic(out, log);
  fs::path metaPath = out;
  metaPath += ".meta.json";
  writeFileAtomic(metaPath, canonicalDump(meta) + "\n");
}

fs::path resolveMotion(const RuntimeConfig& cfg, const std::string& name) {
  if (name.find('/') != std::string::npos || fs::path(name).extension() == ".json") return name;
  return cfg.motions / (name + ".json");
}

void emitOrWrite(const std::string& outPath, const std::string& text, std::ostream& out) {
  if (outPath.empty()) {
    out << text;
  } else {
    const fs::path p(outPath);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    writeFileAtomic(p, text);
  }
}

}  // namespace

int cliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Humanoid control toolkit: simulation, playback, estimation and camera tools", "hop"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string configPath;
  app.add_option("--config", configPath, "Runtime configuration file (JSON)");

  std::string scenarioPath, outPath, motionName, csvPath, cameraPath, pointsPath, kind, bindHost;
  bool sim = false;
  int port = -1;
  std::uint64_t seed = 1;
  std::vector<double> values;

  auto* gaitSim = app.add_subcommand("gait-sim", "Run a closed-loop scenario and write its CSV log");
  gaitSim->add_option("scenario", scenarioPath, "Scenario file")->required();
  gaitSim->add_option("--out", outPath, "Log path (default <log_dir>/<scenario>.csv)");

  auto* play = app.add_subcommand("play-motion", "Play a stored motion");
  play->add_option("name", motionName, "Motion name or path to a motion file")->required();
  play->add_flag("--sim", sim, "Run the motion in the simulator and write the log");
  play->add_option("--out", outPath, "Output path");
  play->add_option("--seed", seed, "Noise seed for --sim");

  auto* replay = app.add_subcommand("filter-replay", "Run the orientation filter over an IMU CSV");
  replay->add_option("csv", csvPath, "IMU samples t,gx,gy,gz,ax,ay,az,mx,my,mz")->required();
  replay->add_option("--out", outPath, "Output CSV (default stdout)");

  auto* calib = app.add_subcommand("calibrate-camera", "Fit the camera extrinsic to ground correspondences");
  calib->add_option("--model", cameraPath, "Camera file")->required();
  calib->add_option("--points", pointsPath, "CSV world_x,world_y,pixel_u,pixel_v")->required();
  calib->add_option("--out", outPath, "Calibrated camera file")->required();

  auto* convert = app.add_subcommand("convert-orientation", "Convert between quaternion and fused angles");
  convert->add_option("kind", kind, "quat or fused")->required();
  convert->add_option("values", values, "w x y z | yaw pitch roll [hemisphere]")->required();

  auto* serve = app.add_subcommand("serve", "Serve the motion store over HTTP");
  serve->add_option("--port", port, "Port (default from config)");
  serve->add_option("--bind", bindHost, "Bind address (default from config)");

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config") {
      ++i;
      continue;
    }
    if (arg.rfind("-", 0) == 0) break;
    bool known = false;
    for (const CLI::App* sub : app.get_subcommands({})) known = known || sub->check_name(arg);
    if (!known) {
      err << "error: unknown subcommand '" << arg << "'\n\n" << app.help();
      return 1;
    }
    break;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (convert->parsed()) return convertOrientation(kind, values, out, err);

    const char* envData = std::getenv("HOP_DATA_DIR");
    RuntimeConfig cfg = RuntimeConfig::defaults(envData && *envData ? envData : HOP_DEFAULT_DATA_DIR);
    if (!configPath.empty()) cfg.apply(readJsonFile(configPath), fs::path(configPath).parent_path());
    cfg.applyEnvironment([](const char* name) { return std::getenv(name); });
    const SimResources res = cfg.loadResources();

    if (gaitSim->parsed()) {
      if (!fs::exists(scenarioPath)) throw std::runtime_error("scenario file not found: " + scenarioPath);
      const Scenario sc = Scenario::load(scenarioPath);
      RunSummary summary;
      const std::string log = runScenarioLog(sc, res, &summary);
      const fs::path dst = outPath.empty() ? cfg.logDir / (fs::path(scenarioPath).stem().string() + ".csv") : fs::path(outPath);
      writeLogWithMeta(dst, log, logMetadata(sc));
      out << "wrote " << dst.string() << " (" << summary.ticks << " ticks, tilt rms " << formatNumber(summary.rmsTiltError)
          << " rad)\n";
      return 0;
    }

    if (play->parsed()) {
      const fs::path path = resolveMotion(cfg, motionName);
      if (!fs::exists(path)) throw std::runtime_error("motion not found: " + path.string());
      const Motion motion = loadMotion(path);
      if (sim) {
        Scenario sc;
        sc.controller = Scenario::Controller::Motion;
        sc.rate = cfg.tickRate;
        sc.seed = seed;
        sc.motion = motion;
        sc.motionPath = path;
        sc.duration = motion.duration() + 0.5;
        RunSummary summary;
        const std::string log = runScenarioLog(sc, res, &summary);
        const fs::path dst = outPath.empty() ? cfg.logDir / (motion.name + ".csv") : fs::path(outPath);
        writeLogWithMeta(dst, log, logMetadata(sc));
        out << "wrote " << dst.string() << " (" << summary.ticks << " ticks, "
            << (summary.motionCompleted ? "completed" : "not completed") << ")\n";
        return summary.motionCompleted ? 0 : 2;
      }
      std::ostringstream csv;
      csv << "t";
      for (const auto name : jointNames()) csv << "," << name;
      csv << "\n";
      PlayState state;
      const double dt = 1.0 / cfg.tickRate;
      for (long k = 0;; ++k) {
        state.time = static_cast<double>(k) * dt;
        const PlayOutput o = playTick(motion, state, FusedAngles{}, dt);
        csv << formatNumber(std::min(state.time, motion.duration()));
        for (double q : o.frame.positions) csv << "," << formatNumber(q);
        csv << "\n";
        if (o.completed) break;
        state = o.state;
      }
      emitOrWrite(outPath, csv.str(), out);
      return 0;
    }

    if (replay->parsed()) {
      if (!fs::exists(csvPath)) throw std::runtime_error("IMU file not found: " + csvPath);
      const std::vector<ImuSample> samples = readImuCsv(csvPath);
      FilterState state = filterInit(res.filter);
      std::ostringstream csv;
      csv << "t,yaw,pitch,roll,hemisphere\n";
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double dt = i > 0 ? samples[i].timestamp - samples[i - 1].timestamp
                                : (samples.size() > 1 ? samples[1].timestamp - samples[0].timestamp : 1.0 / cfg.tickRate);
        state = filterUpdate(state, samples[i], dt);
        const FusedAngles f = estimateFused(state);
        csv << formatNumber(samples[i].timestamp) << "," << formatNumber(f.yaw) << "," << formatNumber(f.pitch) << ","
            << formatNumber(f.roll) << "," << f.hemisphere << "\n";
      }
      emitOrWrite(outPath, csv.str(), out);
      return 0;
    }

    if (calib->parsed()) {
      if (!fs::exists(cameraPath)) throw std::runtime_error("camera file not found: " + cameraPath);
      if (!fs::exists(pointsPath)) throw std::runtime_error("points file not found: " + pointsPath);
      CameraFile file = CameraFile::load(cameraPath);
      const auto points = readCorrespondenceCsv(pointsPath);
      const CalibrationResult r = calibrateExtrinsics(points, file.camera, file.context(res.model));
      file.camera.position = r.position;
      file.camera.orientation = r.orientation;
      emitOrWrite(outPath, canonicalDump(file.toJson()) + "\n", out);
      out << "rms " << formatNumber(r.initialRms) << " -> " << formatNumber(r.rms) << " px\n";
      return 0;
    }

    if (serve->parsed()) {
      if (port >= 0) cfg.port = port;
      if (!bindHost.empty()) cfg.bind = bindHost;
      cfg.validate();
      MotionStore store(cfg.motions);
      MotionService service(store, res);
      ServiceHandle handle(service, cfg.bind, cfg.port);
      out << "listening on " << cfg.bind << ":" << handle.port() << std::endl;
      handle.wait();
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace hop
