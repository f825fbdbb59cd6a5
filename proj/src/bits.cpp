#include "htsim/bits.hpp"

#include "htsim/errors.hpp"

namespace htsim {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::vector<std::uint8_t> parse_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw StructuralError("hex string has odd length " + std::to_string(hex.size()));
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_value(hex[i]);
        const int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) throw StructuralError("invalid hex character near offset " + std::to_string(i));
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

Block128 parse_block(std::string_view hex) {
    const auto bytes = parse_hex(hex);
    if (bytes.size() != kBlockBytes)
        throw StructuralError("expected 32 hex digits for a 128-bit value, got " + std::to_string(hex.size()));
    Block128 block{};
    std::copy(bytes.begin(), bytes.end(), block.begin());
    return block;
}

BitVector block_to_bits(const Block128& block) {
    BitVector bits(kBlockBits);
    for (std::size_t i = 0; i < kBlockBits; ++i)
        bits[i] = static_cast<Bit>((block[i / 8] >> (7 - i % 8)) & 1u);
    return bits;
}

Block128 bits_to_block(std::span<const Bit> bits) {
    if (bits.size() != kBlockBits)
        throw StructuralError("expected 128 bits, got " + std::to_string(bits.size()));
    Block128 block{};
    for (std::size_t i = 0; i < kBlockBits; ++i)
        if (bits[i]) block[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return block;
}

BitVector parse_bit_string(std::string_view text) {
    BitVector bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw StructuralError(std::string("invalid bit character '") + c + "'");
        bits.push_back(static_cast<Bit>(c - '0'));
    }
    return bits;
}

std::string to_bit_string(std::span<const Bit> bits) {
    std::string out;
    out.reserve(bits.size());
    for (auto b : bits) out.push_back(b ? '1' : '0');
    return out;
}

std::size_t hamming_distance(std::span<const Bit> a, std::span<const Bit> b) {
    if (a.size() != b.size()) throw StructuralError("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

} // namespace htsim
