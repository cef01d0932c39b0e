#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidchat/corpus/features.hpp"
#include "vidchat/numerics/parameters.hpp"

namespace vidchat::models {

// Layout (little-endian):
//   "VCKP" | u32 version | u32 n | n bytes of JSON header
//   u32 count | count x (u32 name_len | name | u32 rank | rank x u32 dim | f64 values)
inline constexpr char kCheckpointMagic[4] = {'V', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json header;
  std::map<std::string, std::pair<Shape, std::vector<double>>> params;
};

namespace detail {

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw DataError("checkpoint: truncated parameter values");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

inline std::string get_bytes(std::istream& is, std::uint32_t n, const char* what) {
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n)) throw DataError(std::string("checkpoint: truncated ") + what);
  return s;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const nlohmann::json& header, const ParameterStore& store) {
  os.write(kCheckpointMagic, 4);
  corpus::detail::put_u32(os, kCheckpointVersion);
  const std::string h = header.dump();
  corpus::detail::put_u32(os, static_cast<std::uint32_t>(h.size()));
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  corpus::detail::put_u32(os, static_cast<std::uint32_t>(store.size()));
  for (const auto& [name, p] : store.all()) {
    corpus::detail::put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    corpus::detail::put_u32(os, static_cast<std::uint32_t>(p.rank()));
    for (auto d : p.shape()) corpus::detail::put_u32(os, static_cast<std::uint32_t>(d));
    for (double v : p.data()) detail::put_f64(os, v);
  }
}

inline Checkpoint read_checkpoint(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw DataError("checkpoint: bad magic (not a checkpoint file)");
  }
  const auto version = corpus::detail::get_u32(is, "checkpoint version");
  if (version != kCheckpointVersion) throw DataError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ck;
  const auto hlen = corpus::detail::get_u32(is, "checkpoint header length");
  try {
    ck.header = nlohmann::json::parse(detail::get_bytes(is, hlen, "header"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  }
  const auto count = corpus::detail::get_u32(is, "checkpoint parameter count");
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto nlen = corpus::detail::get_u32(is, "parameter name length");
    std::string name = detail::get_bytes(is, nlen, "parameter name");
    const auto rank = corpus::detail::get_u32(is, "parameter rank");
    Shape shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(corpus::detail::get_u32(is, "parameter dim"));
    std::vector<double> values(shape_size(shape));
    for (auto& v : values) v = detail::get_f64(is);
    ck.params.emplace(std::move(name), std::make_pair(std::move(shape), std::move(values)));
  }
  return ck;
}

// Copies checkpoint values into a store built from the same header. Every
// parameter must be present with the same shape.
inline void apply_checkpoint(const Checkpoint& ck, const ParameterStore& store) {
  if (ck.params.size() != store.size()) {
    throw ConfigError("checkpoint has " + std::to_string(ck.params.size()) + " parameters, model expects " +
                      std::to_string(store.size()));
  }
  for (const auto& [name, p] : store.all()) {
    auto it = ck.params.find(name);
    if (it == ck.params.end()) throw ConfigError("checkpoint lacks parameter " + name);
    if (it->second.first != p.shape()) {
      throw ConfigError("checkpoint parameter " + name + " has shape " + shape_str(it->second.first) +
                        ", model expects " + shape_str(p.shape()));
    }
    std::copy(it->second.second.begin(), it->second.second.end(), p.mutable_data().begin());
  }
}

inline void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& header,
                            const ParameterStore& store) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(os, header, store);
  if (!os) throw DataError("failed writing checkpoint " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(is);
}

}  // namespace vidchat::models
