#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hop/json_io.hpp"
#include "hop/motion.hpp"
#include "hop/sim.hpp"

namespace hop {

struct RuntimeConfig {
  std::filesystem::path model;
  std::filesystem::path gait;
  std::filesystem::path calibration;  // servo calibration
  std::filesystem::path imu;          // filter gains and magnetometer calibration
  std::filesystem::path motions;      // motion store directory
  std::filesystem::path logDir;
  double tickRate = 100.0;
  std::string bind = "127.0.0.1";
  int port = 8080;

  // Defaults rooted at a data directory laid out like the shipped one.
  static RuntimeConfig defaults(const std::filesystem::path& dataDir);
  // Keys: model, gait, calibration, imu, motions, log_dir, tick_rate, bind,
  // port. Relative paths resolve against `baseDir`.
  void apply(const Json& doc, const std::filesystem::path& baseDir);
  // HOP_<KEY> environment variables, e.g. HOP_TICK_RATE=200.
  void applyEnvironment(const std::function<const char*(const char*)>& getenv);
  void validate() const;
  SimResources loadResources() const;
};

// Directory of <name>.json motion documents with an in-memory index.
class MotionStore {
 public:
  struct Entry {
    std::string name;
    std::string timestamp;
  };
  enum class PutStatus { Created, Updated, Invalid, Conflict };
  struct PutResult {
    PutStatus status = PutStatus::Invalid;
    std::string timestamp;
    std::string message;
  };

  explicit MotionStore(std::filesystem::path dir);

  static bool validName(const std::string& name);

  std::vector<Entry> list() const;
  // Canonical bytes and timestamp; nullopt if unknown.
  std::optional<std::pair<std::string, std::string>> get(const std::string& name) const;
  // `ifMatch` set: the write only happens if it equals the current timestamp.
  PutResult put(const std::string& name, const std::string& body, const std::optional<std::string>& ifMatch,
                const AtomicWriteHook& hook = {});
  // Re-reads the directory, dropping leftovers of interrupted writes.
  void reload();
  const std::filesystem::path& directory() const { return m_dir; }

 private:
  std::mutex& writeLock(const std::string& name);
  std::string nextStamp();

  std::filesystem::path m_dir;
  mutable std::shared_mutex m_indexMutex;
  struct Stored {
    std::string timestamp;
    std::string bytes;
  };
  std::map<std::string, Stored> m_index;
  std::uint64_t m_lastStamp = 0;  // guarded by m_indexMutex
  std::mutex m_locksMutex;
  std::map<std::string, std::unique_ptr<std::mutex>> m_writeLocks;
};

struct HttpReply {
  int status = 200;
  std::string body;
  std::string contentType = "application/json";
  std::map<std::string, std::string> headers;
};

// Request handlers independent of the transport.
class MotionService {
 public:
  MotionService(MotionStore& store, SimResources resources, std::uint64_t simSeed = 1);

  HttpReply listMotions() const;
  HttpReply getMotion(const std::string& name) const;
  HttpReply putMotion(const std::string& name, const std::string& body, const std::optional<std::string>& ifMatch);
  HttpReply preview(const std::string& body) const;
  HttpReply model() const;
  // Validates the request; on success `scenario` is ready to stream.
  HttpReply prepareSimulation(const std::string& body, Scenario& scenario) const;
  const SimResources& resources() const { return m_res; }

 private:
  MotionStore& m_store;
  SimResources m_res;
  std::uint64_t m_seed;
};

// HTTP front end on a background thread.
class ServiceHandle {
 public:
  ServiceHandle(MotionService& service, const std::string& host, int port);
  ~ServiceHandle();
  ServiceHandle(const ServiceHandle&) = delete;
  ServiceHandle& operator=(const ServiceHandle&) = delete;

  int port() const { return m_port; }
  void stop();
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> m_impl;
  int m_port = 0;
};

// Entry point of the `hop` tool. Exit codes: 0 ok, 1 usage, 2 runtime failure.
int cliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hop
