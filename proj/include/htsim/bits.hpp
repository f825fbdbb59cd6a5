#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace htsim {

// A single line value; always 0 or 1.
using Bit = std::uint8_t;
using BitVector = std::vector<Bit>;

inline constexpr std::size_t kBlockBytes = 16;
inline constexpr std::size_t kBlockBits = 128;

// 128-bit value stored big-endian: byte 0 holds bits 127..120.
using Block128 = std::array<std::uint8_t, kBlockBytes>;

// Hex text <-> bytes. Accepts upper or lower case; rejects odd length and
// non-hex characters with StructuralError.
std::vector<std::uint8_t> parse_hex(std::string_view hex);
std::string to_hex(std::span<const std::uint8_t> bytes);

Block128 parse_block(std::string_view hex);
inline std::string to_hex(const Block128& block) { return to_hex(std::span<const std::uint8_t>(block)); }

// Serialization order is most-significant bit first.
BitVector block_to_bits(const Block128& block);
Block128 bits_to_block(std::span<const Bit> bits);

// Parses / renders a register-style bit string ("1010"), character i = bit i.
BitVector parse_bit_string(std::string_view text);
std::string to_bit_string(std::span<const Bit> bits);

std::size_t hamming_distance(std::span<const Bit> a, std::span<const Bit> b);

} // namespace htsim
