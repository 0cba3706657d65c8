#pragma once

#include <bit>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "revsent/nn/tensor.hpp"

// Binary checkpoint, all integers little-endian:
//   magic    "REVSENT\0" (8 bytes)
//   version  u32
//   tag      u32 length + bytes (architecture tag)
//   count    u32 number of blocks
//   per block:
//     name     u32 length + bytes
//     rank     u32, then rank x u64 dims
//     data     product(dims) x float64, row-major
//     checksum u64 FNV-1a over the data bytes
namespace revsent::nn::checkpoint {

inline constexpr std::string_view kMagic{"REVSENT\0", 8};
inline constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

struct Block {
  std::string name;
  Tensor value;
};

struct Checkpoint {
  std::string architecture;
  std::vector<Block> blocks;
};

namespace detail {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

inline void put_str(std::string& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string str() { return std::string(bytes(get<std::uint32_t>())); }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw IoError("checkpoint truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize(const Checkpoint& ckpt) {
  std::string out(kMagic);
  detail::put<std::uint32_t>(out, kFormatVersion);
  detail::put_str(out, ckpt.architecture);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.blocks.size()));
  for (const auto& b : ckpt.blocks) {
    detail::put_str(out, b.name);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(b.value.rank()));
    for (auto d : b.value.shape) detail::put<std::uint64_t>(out, d);
    const std::string_view bytes(reinterpret_cast<const char*>(b.value.ptr()),
                                 b.value.size() * sizeof(double));
    out.append(bytes);
    detail::put<std::uint64_t>(out, fnv1a(bytes));
  }
  return out;
}

inline Checkpoint deserialize(std::string_view data) {
  detail::Reader r(data);
  if (r.bytes(kMagic.size()) != kMagic) throw IoError("not a checkpoint (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.architecture = r.str();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    Block b;
    b.name = r.str();
    const auto rank = r.get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint64_t>();
    const std::size_t n = Tensor::numel(shape);
    const auto bytes = r.bytes(n * sizeof(double));
    if (r.get<std::uint64_t>() != fnv1a(bytes)) {
      throw IoError("checkpoint checksum mismatch in block '" + b.name + "'");
    }
    std::vector<double> values(n);
    std::memcpy(values.data(), bytes.data(), bytes.size());
    b.value = Tensor(std::move(shape), std::move(values));
    ckpt.blocks.push_back(std::move(b));
  }
  if (!r.done()) throw IoError("trailing bytes after checkpoint");
  return ckpt;
}

inline void save(const std::string& path, const Checkpoint& ckpt) { write_file(path, serialize(ckpt)); }
inline Checkpoint load(const std::string& path) { return deserialize(read_file(path)); }

}  // namespace revsent::nn::checkpoint
