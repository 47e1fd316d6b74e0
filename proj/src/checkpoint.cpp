#include "roadeta/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace roadeta::ad {

namespace {

constexpr char kMagic[4] = {'R', 'E', 'C', 'K'};
constexpr uint32_t kVersion = 1;

// This code assumes a little-endian host (x86/arm64), as does the speed
// field format.
template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params, bool as_f32) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open checkpoint for write: " + path);
  os.write(kMagic, 4);
  write_pod<uint32_t>(os, kVersion);
  write_pod<uint64_t>(os, params.size());
  for (const auto& [name, arr] : params) {  // map iterates sorted by name
    write_pod<uint32_t>(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<uint8_t>(os, as_f32 ? 1 : 0);
    write_pod<uint8_t>(os, static_cast<uint8_t>(arr.shape.size()));
    for (auto d : arr.shape) write_pod<int64_t>(os, d);
    if (as_f32) {
      std::vector<float> buf(arr.data.begin(), arr.data.end());
      os.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else {
      os.write(reinterpret_cast<const char*>(arr.data.data()),
               static_cast<std::streamsize>(arr.data.size() * sizeof(double)));
    }
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

ParamSet load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad checkpoint magic: " + path);
  auto version = read_pod<uint32_t>(is);
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");
  auto count = read_pod<uint64_t>(is);
  ParamSet out;
  for (uint64_t i = 0; i < count; ++i) {
    auto name_len = read_pod<uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    auto dtype = read_pod<uint8_t>(is);
    auto ndim = read_pod<uint8_t>(is);
    std::vector<int64_t> shape(ndim);
    int64_t n = 1;
    for (auto& d : shape) {
      d = read_pod<int64_t>(is);
      n *= d;
    }
    Array arr = Array::zeros(shape);
    if (dtype == 1) {
      std::vector<float> buf(static_cast<size_t>(n));
      is.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
      std::copy(buf.begin(), buf.end(), arr.data.begin());
    } else {
      is.read(reinterpret_cast<char*>(arr.data.data()),
              static_cast<std::streamsize>(arr.data.size() * sizeof(double)));
    }
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    out.emplace(std::move(name), std::move(arr));
  }
  return out;
}

}  // namespace roadeta::ad
