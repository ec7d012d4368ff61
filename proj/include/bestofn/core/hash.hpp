#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace bestofn {

constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

class Fnv1a64 {
 public:
  void update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= bytes[i];
      hash_ *= kFnvPrime;
    }
  }

  void update_u8(std::uint8_t v) { update(&v, 1); }

  void update_u32(std::uint32_t v) { update(&v, sizeof(v)); }

  /// Hashes the bit pattern; -0.0 is normalized to +0.0 so numerically
  /// equal values always produce equal digests.
  void update_double(double v) {
    if (v == 0.0) v = 0.0;
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    update(&bits, sizeof(bits));
  }

  void update_str(const std::string& s) { update(s.data(), s.size()); }

  std::uint64_t digest() const { return hash_; }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[h & 0xf];
      h >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t hash_ = kFnvOffsetBasis;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  Fnv1a64 h;
  h.update(data, len);
  return h.digest();
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t splitmix64_once(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive 64-bit combiner used for trial-seed derivation. Adding
/// new inputs to a campaign never perturbs seeds mixed from other inputs.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return splitmix64_once(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

}  // namespace bestofn
