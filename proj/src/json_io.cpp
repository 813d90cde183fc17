#include "hop/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "hop/errors.hpp"

namespace hop {
namespace {

void dumpInto(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      // nlohmann::json objects are std::map backed, so iteration is sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dumpInto(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dumpInto(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += formatNumber(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string formatNumber(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("cannot format non-finite number");
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string canonicalDump(const Json& doc) {
  std::string out;
  dumpInto(doc, out);
  return out;
}

Json parseJson(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw SchemaError("", what + " is not valid JSON: " + e.what());
  }
}

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json readJsonFile(const std::filesystem::path& path) { return parseJson(readTextFile(path), path.string()); }

void writeFileAtomic(const std::filesystem::path& path, std::string_view content, const AtomicWriteHook& hook) {
  auto tmp = path;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw std::runtime_error("cannot create " + tmp.string());
  struct Closer {
    int fd;
    ~Closer() { ::close(fd); }
  } closer{fd};
  const auto writeRange = [&](std::size_t from, std::size_t to) {
    while (from < to) {
      const auto n = ::write(fd, content.data() + from, to - from);
      if (n <= 0) throw std::runtime_error("write failed for " + tmp.string());
      from += static_cast<std::size_t>(n);
    }
  };
  const std::size_t half = content.size() / 2;
  writeRange(0, half);
  if (hook) hook(AtomicWriteStage::PartiallyWritten);
  writeRange(half, content.size());
  if (::fsync(fd) != 0) throw std::runtime_error("fsync failed for " + tmp.string());
  if (hook) hook(AtomicWriteStage::Synced);
  std::filesystem::rename(tmp, path);
  if (hook) hook(AtomicWriteStage::Renamed);
}

namespace schema {

void requireObject(const Json& obj, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  requireObject(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

static std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number()) throw SchemaError(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(join(path, key), "expected a finite number");
  return d;
}

double numberOr(const Json& obj, const char* key, double fallback, const std::string& path) {
  requireObject(obj, path);
  return obj.contains(key) ? number(obj, key, path) : fallback;
}

int integer(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(join(path, key), "expected an integer");
  return v.get<int>();
}

std::string string(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_string()) throw SchemaError(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& obj, const char* key, std::size_t expected, const std::string& path) {
  const Json& v = field(obj, key, path);
  const std::string p = join(path, key);
  if (!v.is_array()) throw SchemaError(p, "expected an array");
  if (expected && v.size() != expected)
    throw SchemaError(p, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError(p + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
    if (!std::isfinite(out.back())) throw SchemaError(p + "[" + std::to_string(i) + "]", "expected a finite number");
  }
  return out;
}

Vec3 vec3(const Json& obj, const char* key, const std::string& path) {
  const auto v = numbers(obj, key, 3, path);
  return {v[0], v[1], v[2]};
}

void onlyKeys(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
  requireObject(obj, path);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == it.key();
    if (!ok) throw SchemaError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

}  // namespace schema
}  // namespace hop
