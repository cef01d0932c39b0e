#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vidchat/numerics/errors.hpp"

namespace vidchat::corpus {

// Per-video frame features, one row per frame; frame i is at i / fps seconds.
struct FeatureMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> data;  // row-major

  const float* row(std::size_t i) const { return data.data() + i * cols; }
  bool operator==(const FeatureMatrix&) const = default;
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), 4);
}

inline std::uint32_t get_u32(std::istream& is, const std::string& what) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw DataError("truncated " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

// "VFEA" | u32 rows | u32 cols | rows*cols f32, all little-endian.
inline void write_vfea(std::ostream& os, const FeatureMatrix& m) {
  if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols) {
    throw DataError("write_vfea: data length does not match rows*cols");
  }
  os.write("VFEA", 4);
  detail::put_u32(os, m.rows);
  detail::put_u32(os, m.cols);
  for (float f : m.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    detail::put_u32(os, bits);
  }
}

inline FeatureMatrix read_vfea(std::istream& is, const std::string& name = "feature file") {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || std::string(magic.data(), 4) != "VFEA") {
    throw DataError(name + ": bad magic, expected VFEA");
  }
  FeatureMatrix m;
  m.rows = detail::get_u32(is, name);
  m.cols = detail::get_u32(is, name);
  m.data.resize(static_cast<std::size_t>(m.rows) * m.cols);
  for (auto& f : m.data) {
    const std::uint32_t bits = detail::get_u32(is, name + " payload");
    std::memcpy(&f, &bits, 4);
  }
  return m;
}

inline void save_vfea(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  write_vfea(os, m);
}

inline FeatureMatrix load_vfea(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open feature file " + path.string());
  return read_vfea(is, path.string());
}

// Source of per-video features keyed by video id.
class FrameStore {
 public:
  virtual ~FrameStore() = default;
  virtual std::optional<FeatureMatrix> load(const std::string& video_id) const = 0;
  // Where the features of a video live, recorded in triple output.
  virtual std::string path_of(const std::string& video_id) const = 0;
};

// <dir>/<video_id>.vfea
class DirectoryFrameStore : public FrameStore {
 public:
  explicit DirectoryFrameStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<FeatureMatrix> load(const std::string& video_id) const override {
    auto p = dir_ / (video_id + ".vfea");
    if (!std::filesystem::exists(p)) return std::nullopt;
    return load_vfea(p);
  }
  std::string path_of(const std::string& video_id) const override {
    return (dir_ / (video_id + ".vfea")).generic_string();
  }

 private:
  std::filesystem::path dir_;
};

class MemoryFrameStore : public FrameStore {
 public:
  void put(const std::string& video_id, FeatureMatrix m) { store_[video_id] = std::move(m); }

  std::optional<FeatureMatrix> load(const std::string& video_id) const override {
    auto it = store_.find(video_id);
    if (it == store_.end()) return std::nullopt;
    return it->second;
  }
  std::string path_of(const std::string& video_id) const override { return "mem:" + video_id; }

 private:
  std::map<std::string, FeatureMatrix> store_;
};

}  // namespace vidchat::corpus
