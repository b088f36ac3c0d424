#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <vector>

namespace hyplab::detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
  }
  return v;
}

inline void put_f64(std::vector<char>& buf, double x) {
  const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(x));
  char raw[8];
  std::memcpy(raw, &bits, 8);
  buf.insert(buf.end(), raw, raw + 8);
}

inline double get_f64(const char* p) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, p, 8);
  return std::bit_cast<double>(to_little_endian(bits));
}

}  // namespace hyplab::detail
