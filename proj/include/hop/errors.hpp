#pragma once

#include <stdexcept>
#include <string>

namespace hop {

// Precondition violations on caller-supplied values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A document (model, motion, config, scenario) failed validation. `path()`
// names the offending element, e.g. "links[3].mass" or "keyframes[2]".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), m_path(std::move(path)) {}
  const std::string& path() const noexcept { return m_path; }

 private:
  std::string m_path;
};

class UnreachableError : public std::runtime_error {
 public:
  // `excess` is how far (m) the target lies outside the reachable shell.
  UnreachableError(const std::string& what, double excess)
      : std::runtime_error(what), m_excess(excess) {}
  double excess() const noexcept { return m_excess; }

 private:
  double m_excess;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double u, double v, double residual)
      : std::runtime_error(what), m_u(u), m_v(v), m_residual(residual) {}
  double u() const noexcept { return m_u; }
  double v() const noexcept { return m_v; }
  double residual() const noexcept { return m_residual; }

 private:
  double m_u, m_v, m_residual;
};

class OutOfViewError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoIntersectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelInvalidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, long tick)
      : std::runtime_error(what), m_tick(tick) {}
  long tick() const noexcept { return m_tick; }

 private:
  long m_tick;
};

}  // namespace hop
