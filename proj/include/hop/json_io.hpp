#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hop/orientation.hpp"

namespace hop {

using Json = nlohmann::json;

// Canonical document form: keys sorted, no insignificant whitespace, floats
// printed with 9 significant digits, negative zero printed as 0. Two
// documents with the same content always produce the same bytes.
std::string canonicalDump(const Json& doc);

// "%.9g" formatting shared by canonical JSON and the CSV logs.
std::string formatNumber(double value);

Json parseJson(std::string_view text, const std::string& what = "document");
Json readJsonFile(const std::filesystem::path& path);
std::string readTextFile(const std::filesystem::path& path);

enum class AtomicWriteStage { PartiallyWritten, Synced, Renamed };
// Called at each stage; throwing from it simulates a crash at that point.
using AtomicWriteHook = std::function<void(AtomicWriteStage)>;

// Writes `content` to a sibling temp file, fsyncs, then renames over `path`.
void writeFileAtomic(const std::filesystem::path& path, std::string_view content, const AtomicWriteHook& hook = {});

// Schema helpers. Each throws SchemaError naming `path` on failure.
namespace schema {

const Json& field(const Json& obj, const char* key, const std::string& path);
double number(const Json& obj, const char* key, const std::string& path);
double numberOr(const Json& obj, const char* key, double fallback, const std::string& path);
int integer(const Json& obj, const char* key, const std::string& path);
std::string string(const Json& obj, const char* key, const std::string& path);
Vec3 vec3(const Json& obj, const char* key, const std::string& path);
std::vector<double> numbers(const Json& obj, const char* key, std::size_t expected, const std::string& path);
void onlyKeys(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& path);
void requireObject(const Json& obj, const std::string& path);

}  // namespace schema

}  // namespace hop
