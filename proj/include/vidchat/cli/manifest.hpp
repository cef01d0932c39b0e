#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidchat/numerics/errors.hpp"
#include "vidchat/numerics/random.hpp"

namespace vidchat::cli {

// 64-bit FNV-1a over the file bytes, as 16 hex digits. Directories hash
// their regular files in path order.
inline std::string content_hash(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  auto hex = [](std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
  };
  auto file_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read " + p.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string acc;
    for (const auto& f : files) acc += fs::relative(f, path).generic_string() + ":" + hex(fnv1a(file_bytes(f))) + "\n";
    return hex(fnv1a(acc));
  }
  return hex(fnv1a(file_bytes(path)));
}

// One per command run; written next to the primary output.
class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t seed)
      : command_(std::move(command)), seed_(seed), start_(std::chrono::steady_clock::now()) {}

  void config(nlohmann::json c) { config_ = std::move(c); }
  void input(const std::filesystem::path& p) { inputs_[p.generic_string()] = content_hash(p); }
  void output(const std::filesystem::path& p) { outputs_.push_back(p); }

  nlohmann::json to_json() const {
    nlohmann::json outs = nlohmann::json::object();
    for (const auto& p : outputs_) outs[p.generic_string()] = content_hash(p);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return {{"command", command_}, {"config", config_}, {"seed", seed_},
            {"inputs", inputs_},   {"outputs", outs},   {"wall_time_s", secs}};
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write manifest " + path.string());
    os << to_json().dump(2) << '\n';
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::chrono::steady_clock::time_point start_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::object();
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace vidchat::cli
