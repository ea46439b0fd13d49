// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>

namespace corerev {

// Little-endian float32 payloads shared by the embedding and checkpoint
// files.
inline void write_f32_le(std::ostream& out, std::span<const float> values) {
  for (float v : values) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    unsigned char bytes[4] = {
        static_cast<unsigned char>(bits & 0xFF),
        static_cast<unsigned char>((bits >> 8) & 0xFF),
        static_cast<unsigned char>((bits >> 16) & 0xFF),
        static_cast<unsigned char>((bits >> 24) & 0xFF),
    };
    out.write(reinterpret_cast<const char*>(bytes), 4);
  }
}

// Returns false if the stream ran out before `values` was filled.
inline bool read_f32_le(std::istream& in, std::span<float> values) {
  for (float& v : values) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
    std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                         (static_cast<std::uint32_t>(bytes[1]) << 8) |
                         (static_cast<std::uint32_t>(bytes[2]) << 16) |
                         (static_cast<std::uint32_t>(bytes[3]) << 24);
    v = std::bit_cast<float>(bits);
  }
  return true;
}

}  // namespace corerev
