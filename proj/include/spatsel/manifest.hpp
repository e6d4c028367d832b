#pragma once

// Run manifests: every command writes one JSON manifest per output directory
// with reproducible input/config digests.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spatsel {

std::string fnv1a_hex(const std::string& bytes);
std::string digest_file(const std::string& path);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::map<std::string, std::string> inputs;  // path -> digest
  std::vector<std::string> outputs;
  std::map<std::string, std::string> notes;
};

std::string iso_timestamp();
void write_manifest(const RunManifest& manifest, const std::string& dir);

}  // namespace spatsel
