#pragma once

#include <string>

#include "htsim/bits.hpp"

namespace htsim {

// Packed bitstream file: 8-byte little-endian bit count, then ceil(n/8)
// bytes, bits packed most-significant first; trailing pad bits are zero.
void write_bitstream(const std::string& path, const BitVector& bits);
BitVector read_bitstream(const std::string& path);

std::string pack_bitstream(const BitVector& bits);
BitVector unpack_bitstream(const std::string& data);

} // namespace htsim
