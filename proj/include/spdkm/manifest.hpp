#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "spdkm/errors.hpp"
#include "spdkm/rng.hpp"
#include "spdkm/version.hpp"

namespace spdkm {

// FNV-1a digest of a file's raw bytes, as a 16-hex-digit string.
inline std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for digest");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

inline std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Everything needed to reproduce a CLI run bit-for-bit given the same binary:
// the command, its resolved parameters, the base seed, and input digests.
struct RunManifest {
  std::string command;
  nlohmann::json parameters;  // flag name -> resolved value
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // input path -> fnv1a64 hex
};

// Writes the manifest as a sidecar next to the named output. The timestamp
// makes manifests differ across runs; the data outputs themselves stay
// byte-identical.
inline void write_manifest(const std::filesystem::path& out_file, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["inputs"] = m.input_digests;
  j["library_version"] = kVersion;
  j["timestamp_utc"] = utc_timestamp_now();
  const std::filesystem::path path = out_file.string() + ".manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing manifest " + path.string());
}

}  // namespace spdkm
