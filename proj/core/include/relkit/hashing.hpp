#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace relkit::hashing {

// 64-bit FNV-1a, chained over nested encodings. The byte-level serialization
// is fixed so hashes are identical across runs and platforms:
//   * u64 values are absorbed as 8 bytes, little-endian;
//   * strings are absorbed as u64(length) followed by the raw bytes;
//   * every structured hash starts from a small tag byte that names the
//     level being hashed (vertex pair list, vertex, edge, graph, feature),
//     which keeps the levels of the construction from colliding.

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

class Fnv64 {
 public:
  Fnv64() = default;
  explicit Fnv64(std::uint8_t tag) { byte(tag); }

  void byte(std::uint8_t b) {
    state_ ^= b;
    state_ *= kFnvPrime;
  }

  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) byte(p[i]);
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void str(std::string_view s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = kFnvOffset;
};

inline std::uint64_t hash_str(std::string_view s) {
  Fnv64 h;
  h.str(s);
  return h.digest();
}

}  // namespace relkit::hashing
