#include "htsim/bitstream_io.hpp"

#include <fstream>
#include <iterator>

#include "htsim/errors.hpp"

namespace htsim {

std::string pack_bitstream(const BitVector& bits) {
    const std::uint64_t n = bits.size();
    std::string out(8 + (n + 7) / 8, '\0');
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<char>((n >> (8 * i)) & 0xFF);
    for (std::uint64_t i = 0; i < n; ++i)
        if (bits[i]) out[8 + i / 8] = static_cast<char>(static_cast<unsigned char>(out[8 + i / 8]) | (0x80u >> (i % 8)));
    return out;
}

BitVector unpack_bitstream(const std::string& data) {
    if (data.size() < 8) throw StructuralError("bitstream shorter than its 8-byte header");
    std::uint64_t n = 0;
    for (int i = 7; i >= 0; --i) n = (n << 8) | static_cast<unsigned char>(data[static_cast<std::size_t>(i)]);
    if (data.size() - 8 != (n + 7) / 8)
        throw StructuralError("bitstream header declares " + std::to_string(n) + " bits but payload has " +
                              std::to_string(data.size() - 8) + " bytes");
    BitVector bits(n);
    for (std::uint64_t i = 0; i < n; ++i)
        bits[i] = static_cast<Bit>((static_cast<unsigned char>(data[8 + i / 8]) >> (7 - i % 8)) & 1u);
    return bits;
}

void write_bitstream(const std::string& path, const BitVector& bits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write bitstream '" + path + "'");
    const std::string data = pack_bitstream(bits);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw StructuralError("short write to '" + path + "'");
}

BitVector read_bitstream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("cannot open bitstream '" + path + "'");
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return unpack_bitstream(data);
}

} // namespace htsim
