#include "spatsel/manifest.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spatsel/errors.hpp"

namespace spatsel {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("digest_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::string& dir) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config_digest"] = manifest.config_digest;
  j["seed"] = manifest.seed;
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["notes"] = manifest.notes;
  const std::string path = dir + "/manifest.json";
  std::ofstream out(path);
  if (!out) throw data_error("write_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace spatsel
