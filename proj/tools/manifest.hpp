#pragma once

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pw/io.hpp"

namespace pwcli {

using nlohmann::json;

/// Reproducibility record written next to every command's outputs: the
/// resolved configuration, input digests, and per-phase wall times.
struct RunManifest {
  std::string command;
  json config = json::object();
  std::vector<std::string> argv;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest

  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();
  double read_s = 0.0, solve_s = 0.0, write_s = 0.0;

  void add_input(const std::string& path) {
    inputs.emplace_back(path, pw::io::file_digest_hex(path));
  }

  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(now - t0).count();
    t0 = now;
    return dt;
  }

  void write(const std::string& path) const {
    json j;
    j["command"] = command;
    j["version"] = pw::io::kToolVersion;
    j["config"] = config;
    j["argv"] = argv;
    json ins = json::array();
    for (const auto& [p, digest] : inputs)
      ins.push_back({{"path", p}, {"fnv1a64", digest}});
    j["inputs"] = ins;
    j["timings_s"] = {{"read", read_s}, {"solve", solve_s}, {"write", write_s}};
    std::ofstream out(path);
    out << j.dump(2) << "\n";
  }
};

}  // namespace pwcli
