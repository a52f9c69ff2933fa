#pragma once

#include <map>
#include <string>
#include <vector>

namespace lexinduce::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_file(const std::string& path);

// Enough to replay a command: the argument vector, the resolved option
// values, and digests of every input file.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::vector<std::string> args;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::string seed;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  void save(const std::string& path) const;
  static RunManifest load(const std::string& path);

  // Throws InputError naming the first input whose digest changed.
  void verify_inputs() const;
};

}  // namespace lexinduce::cli
