#include "hop/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <regex>

#include "hop/errors.hpp"

namespace hop {
namespace fs = std::filesystem;

RuntimeConfig RuntimeConfig::defaults(const fs::path& dataDir) {
  RuntimeConfig c;
  c.model = dataDir / "model" / "robot.json";
  c.gait = dataDir / "gait" / "default.json";
  c.calibration = dataDir / "calibration" / "servo.json";
  c.imu = dataDir / "calibration" / "imu.json";
  c.motions = dataDir / "motions";
  c.logDir = "logs";
  return c;
}

void RuntimeConfig::apply(const Json& doc, const fs::path& baseDir) {
  schema::onlyKeys(doc, {"model", "gait", "calibration", "imu", "motions", "log_dir", "tick_rate", "bind", "port", "notes"},
                   "");
  const auto path = [&](const char* key, fs::path& dst) {
    if (doc.contains(key)) dst = baseDir / schema::string(doc, key, "");
  };
  path("model", model);
  path("gait", gait);
  path("calibration", calibration);
  path("imu", imu);
  path("motions", motions);
  path("log_dir", logDir);
  tickRate = schema::numberOr(doc, "tick_rate", tickRate, "");
  if (doc.contains("bind")) bind = schema::string(doc, "bind", "");
  if (doc.contains("port")) port = schema::integer(doc, "port", "");
}

void RuntimeConfig::applyEnvironment(const std::function<const char*(const char*)>& getenv) {
  const auto text = [&](const char* var) -> std::optional<std::string> {
    const char* v = getenv(var);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  const auto number = [&](const char* var, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(var) + " is not a number: " + v);
    }
  };
  if (auto v = text("HOP_MODEL")) model = *v;
  if (auto v = text("HOP_GAIT")) gait = *v;
  if (auto v = text("HOP_CALIBRATION")) calibration = *v;
  if (auto v = text("HOP_IMU")) imu = *v;
  if (auto v = text("HOP_MOTIONS")) motions = *v;
  if (auto v = text("HOP_LOG_DIR")) logDir = *v;
  if (auto v = text("HOP_TICK_RATE")) tickRate = number("HOP_TICK_RATE", *v);
  if (auto v = text("HOP_BIND")) bind = *v;
  if (auto v = text("HOP_PORT")) {
    const double p = number("HOP_PORT", *v);
    if (p != std::floor(p)) throw InvalidArgument("HOP_PORT must be an integer");
    port = static_cast<int>(p);
  }
}

void RuntimeConfig::validate() const {
  if (!(tickRate >= 10.0 && tickRate <= 1000.0)) throw InvalidArgument("tick_rate must lie in [10, 1000] Hz");
  if (port < 0 || port > 65535) throw InvalidArgument("port must lie in [0, 65535]");
  for (const fs::path* p : {&model, &gait, &calibration, &imu})
    if (!fs::exists(*p)) throw InvalidArgument("file not found: " + p->string());
}

SimResources RuntimeConfig::loadResources() const {
  validate();
  SimResources r{RobotModel::load(model), GaitConfig::load(gait), ServoCalibration::load(calibration), FilterConfig{}};
  const Json imuDoc = readJsonFile(imu);
  schema::onlyKeys(imuDoc, {"schema_version", "notes", "filter"}, "");
  r.filter = FilterConfig::fromJson(schema::field(imuDoc, "filter", ""), "filter");
  return r;
}

// ---------------------------------------------------------------------------
// MotionStore

MotionStore::MotionStore(fs::path dir) : m_dir(std::move(dir)) {
  fs::create_directories(m_dir);
  reload();
}

bool MotionStore::validName(const std::string& name) {
  static const std::regex kName("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(name, kName);
}

std::string MotionStore::nextStamp() {
  const auto now = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  m_lastStamp = std::max(m_lastStamp + 1, static_cast<std::uint64_t>(now));
  return std::to_string(m_lastStamp);
}

void MotionStore::reload() {
  std::unique_lock lock(m_indexMutex);
  m_index.clear();
  for (const auto& entry : fs::directory_iterator(m_dir)) {
    const fs::path& p = entry.path();
    if (p.extension() == ".tmp") {
      std::error_code ec;
      fs::remove(p, ec);
      continue;
    }
    if (p.extension() != ".json" || !validName(p.stem().string())) continue;
    try {
      const Motion m = loadMotion(p);
      if (m.name != p.stem().string()) continue;
      m_index[m.name] = {nextStamp(), saveMotion(m)};
    } catch (const std::exception&) {
      // Unreadable documents are not served.
    }
  }
}

std::vector<MotionStore::Entry> MotionStore::list() const {
  std::shared_lock lock(m_indexMutex);
  std::vector<Entry> out;
  for (const auto& [name, stored] : m_index) out.push_back({name, stored.timestamp});
  return out;
}

std::optional<std::pair<std::string, std::string>> MotionStore::get(const std::string& name) const {
  std::shared_lock lock(m_indexMutex);
  const auto it = m_index.find(name);
  if (it == m_index.end()) return std::nullopt;
  return std::make_pair(it->second.bytes, it->second.timestamp);
}

std::mutex& MotionStore::writeLock(const std::string& name) {
  std::lock_guard lock(m_locksMutex);
  auto& slot = m_writeLocks[name];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

MotionStore::PutResult MotionStore::put(const std::string& name, const std::string& body,
                                        const std::optional<std::string>& ifMatch, const AtomicWriteHook& hook) {
  PutResult result;
  if (!validName(name)) {
    result.message = "invalid motion name";
    return result;
  }
  Motion motion;
  try {
    motion = motionFromJson(parseJson(body, "motion"));
  } catch (const SchemaError& e) {
    result.message = e.what();
    return result;
  }
  if (motion.name != name) {
    result.message = "name: document name \"" + motion.name + "\" does not match \"" + name + "\"";
    return result;
  }
  const std::string bytes = saveMotion(motion);

  std::lock_guard write(writeLock(name));
  bool exists = false;
  {
    std::shared_lock lock(m_indexMutex);
    const auto it = m_index.find(name);
    exists = it != m_index.end();
    if (ifMatch && *ifMatch != "*" && (!exists || it->second.timestamp != *ifMatch)) {
      result.status = PutStatus::Conflict;
      result.timestamp = exists ? it->second.timestamp : "";
      result.message = "stale If-Match";
      return result;
    }
  }
  writeFileAtomic(m_dir / (name + ".json"), bytes, hook);
  std::unique_lock lock(m_indexMutex);
  result.timestamp = nextStamp();
  m_index[name] = {result.timestamp, bytes};
  result.status = exists ? PutStatus::Updated : PutStatus::Created;
  return result;
}

// ---------------------------------------------------------------------------
// MotionService

namespace {

HttpReply jsonReply(int status, const Json& doc) {
  HttpReply r;
  r.status = status;
  r.body = canonicalDump(doc) + "\n";
  return r;
}

HttpReply errorReply(int status, const std::string& message) { return jsonReply(status, {{"error", message}}); }

Json jointsJson(const JointArray& a) { return Json(std::vector<double>(a.begin(), a.end())); }

}  // namespace

MotionService::MotionService(MotionStore& store, SimResources resources, std::uint64_t simSeed)
    : m_store(store), m_res(std::move(resources)), m_seed(simSeed) {}

HttpReply MotionService::listMotions() const {
  Json arr = Json::array();
  for (const auto& e : m_store.list()) arr.push_back({{"name", e.name}, {"timestamp", e.timestamp}});
  return jsonReply(200, {{"motions", arr}});
}

HttpReply MotionService::getMotion(const std::string& name) const {
  const auto found = m_store.get(name);
  if (!found) return errorReply(404, "unknown motion: " + name);
  HttpReply r;
  r.body = found->first;
  r.headers["ETag"] = found->second;
  return r;
}

HttpReply MotionService::putMotion(const std::string& name, const std::string& body,
                                   const std::optional<std::string>& ifMatch) {
  std::optional<std::string> tag = ifMatch;
  if (tag && tag->size() >= 2 && tag->front() == '"' && tag->back() == '"') tag = tag->substr(1, tag->size() - 2);
  const MotionStore::PutResult r = m_store.put(name, body, tag);
  switch (r.status) {
    case MotionStore::PutStatus::Invalid:
      return errorReply(422, r.message);
    case MotionStore::PutStatus::Conflict: {
      HttpReply reply = errorReply(409, r.message);
      if (!r.timestamp.empty()) reply.headers["ETag"] = r.timestamp;
      return reply;
    }
    case MotionStore::PutStatus::Created:
    case MotionStore::PutStatus::Updated: {
      HttpReply reply = jsonReply(r.status == MotionStore::PutStatus::Created ? 201 : 200,
                                  {{"name", name}, {"timestamp", r.timestamp}});
      reply.headers["ETag"] = r.timestamp;
      return reply;
    }
  }
  return errorReply(500, "unexpected store state");
}

HttpReply MotionService::preview(const std::string& body) const {
  Motion motion;
  double t = 0.0;
  try {
    const Json req = parseJson(body, "request");
    schema::onlyKeys(req, {"motion", "t"}, "");
    motion = motionFromJson(schema::field(req, "motion", ""));
    t = schema::number(req, "t", "");
  } catch (const SchemaError& e) {
    return errorReply(422, e.what());
  }
  MotionFrame frame;
  try {
    frame = interpolate(motion, t);
  } catch (const InvalidArgument& e) {
    return errorReply(422, std::string("t: ") + e.what());
  }
  JointPose q;
  std::copy(frame.positions.begin(), frame.positions.end(), q.q.begin());
  Json links = Json::object();
  for (const auto& [name, tf] : forwardKinematics(m_res.model, q)) {
    const RotationQuat& o = tf.orientation;
    links[name] = {{"position", {tf.position.x(), tf.position.y(), tf.position.z()}},
                   {"orientation", {o.w(), o.x(), o.y(), o.z()}}};
  }
  return jsonReply(200, {{"t", t},
                         {"frame",
                          {{"pos", jointsJson(frame.positions)},
                           {"vel", jointsJson(frame.velocities)},
                           {"eff", jointsJson(frame.efforts)},
                           {"sup", {{"l", frame.support.left}, {"r", frame.support.right}}}}},
                         {"links", links}});
}

HttpReply MotionService::model() const { return jsonReply(200, m_res.model.document()); }

HttpReply MotionService::prepareSimulation(const std::string& body, Scenario& scenario) const {
  std::string name;
  std::uint64_t seed = m_seed;
  try {
    const Json req = parseJson(body, "request");
    schema::onlyKeys(req, {"motion", "seed"}, "");
    name = schema::string(req, "motion", "");
    if (req.contains("seed")) {
      if (!req["seed"].is_number_unsigned()) throw SchemaError("seed", "expected a non-negative integer");
      seed = req["seed"].get<std::uint64_t>();
    }
  } catch (const SchemaError& e) {
    return errorReply(422, e.what());
  }
  const auto found = m_store.get(name);
  if (!found) return errorReply(404, "unknown motion: " + name);
  scenario = Scenario{};
  scenario.controller = Scenario::Controller::Motion;
  scenario.seed = seed;
  scenario.motion = motionFromJson(parseJson(found->first));
  scenario.duration = scenario.motion->duration() + 0.5;
  HttpReply ok;
  ok.contentType = "text/csv";
  return ok;
}

}  // namespace hop
