#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spdkm/errors.hpp"

namespace spdkm {

// Minimal binary tensor container:
//   magic "SPDK" | u32 version (= 1) | u32 ndim | ndim x u64 dims |
//   row-major (last index fastest) f64 payload
// All integers and floats little-endian; NaN payload values mark nodata.
struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> data;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::uint64_t d : dims) n *= static_cast<std::size_t>(d);
    return dims.empty() ? 0 : n;
  }
};

namespace detail {

inline constexpr char kTensorMagic[4] = {'S', 'P', 'D', 'K'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint32_t kMaxRank = 16;

template <class T>
T byteswap_int(T v) {
  T out = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out = static_cast<T>(out << 8) | static_cast<T>((v >> (8 * i)) & 0xff);
  }
  return out;
}

template <class T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return byteswap_int(v);
  }
}

template <class T>
void put_int(std::string& out, T v) {
  const T le = to_le(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &le, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get_int(const std::string& bytes, std::size_t& off, const std::string& what) {
  if (off + sizeof(T) > bytes.size()) throw IoError("tensor file truncated in " + what);
  T v;
  std::memcpy(&v, bytes.data() + off, sizeof(T));
  off += sizeof(T);
  return to_le(v);
}

}  // namespace detail

inline Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) throw IoError("failed reading tensor file " + path.string());

  std::size_t off = 0;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), detail::kTensorMagic, 4) != 0) {
    throw IoError("bad magic in " + path.string() + ": expected \"SPDK\"");
  }
  off = 4;
  const auto version = detail::get_int<std::uint32_t>(bytes, off, "version");
  if (version != detail::kTensorVersion) {
    throw IoError("unsupported tensor version " + std::to_string(version) + " in " +
                  path.string());
  }
  const auto ndim = detail::get_int<std::uint32_t>(bytes, off, "ndim");
  if (ndim == 0 || ndim > detail::kMaxRank) {
    throw IoError("implausible tensor rank " + std::to_string(ndim) + " in " + path.string());
  }
  Tensor t;
  t.dims.resize(ndim);
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    t.dims[i] = detail::get_int<std::uint64_t>(bytes, off, "dims");
    if (t.dims[i] > 0 && count > std::numeric_limits<std::size_t>::max() / t.dims[i]) {
      throw IoError("tensor dims overflow in " + path.string());
    }
    count *= static_cast<std::size_t>(t.dims[i]);
  }
  const std::size_t payload = count * sizeof(double);
  if (bytes.size() - off != payload) {
    throw IoError("payload length mismatch in " + path.string() + ": header implies " +
                  std::to_string(payload) + " bytes, file has " +
                  std::to_string(bytes.size() - off));
  }
  t.data.resize(count);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(t.data.data(), bytes.data() + off, payload);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t raw;
      std::memcpy(&raw, bytes.data() + off + i * 8, 8);
      raw = detail::byteswap_int(raw);
      std::memcpy(&t.data[i], &raw, 8);
    }
  }
  return t;
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  if (t.dims.empty() || t.dims.size() > detail::kMaxRank) {
    throw InvalidArgument("tensor rank must be in [1, " + std::to_string(detail::kMaxRank) + "]");
  }
  if (t.data.size() != t.size()) {
    throw DimensionMismatch("tensor payload does not match its dims");
  }
  std::string bytes;
  bytes.reserve(16 + t.dims.size() * 8 + t.data.size() * 8);
  bytes.append(detail::kTensorMagic, 4);
  detail::put_int<std::uint32_t>(bytes, detail::kTensorVersion);
  detail::put_int<std::uint32_t>(bytes, static_cast<std::uint32_t>(t.dims.size()));
  for (std::uint64_t d : t.dims) detail::put_int<std::uint64_t>(bytes, d);
  if constexpr (std::endian::native == std::endian::little) {
    bytes.append(reinterpret_cast<const char*>(t.data.data()), t.data.size() * 8);
  } else {
    for (double v : t.data) {
      std::uint64_t raw;
      std::memcpy(&raw, &v, 8);
      detail::put_int<std::uint64_t>(bytes, raw);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing tensor file " + path.string());
}

}  // namespace spdkm
