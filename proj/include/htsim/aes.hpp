#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "htsim/bits.hpp"

namespace htsim {

// Cipher engine behind the host's output mux.
class BlockCipher {
  public:
    virtual ~BlockCipher() = default;
    virtual Block128 encrypt(const Block128& plaintext) const = 0;
    virtual std::string name() const = 0;
    virtual std::unique_ptr<BlockCipher> clone() const = 0;
};

// FIPS-197 AES with a 128-bit key, single-block encryption only.
class Aes128 final : public BlockCipher {
  public:
    explicit Aes128(const Block128& key);

    Block128 encrypt(const Block128& plaintext) const override;
    std::string name() const override { return "aes-128"; }
    std::unique_ptr<BlockCipher> clone() const override { return std::make_unique<Aes128>(*this); }

  private:
    std::array<std::uint8_t, 176> round_keys_{};
};

// Throws StructuralError unless both inputs are exactly 16 bytes.
Block128 encrypt_block(std::span<const std::uint8_t> key, std::span<const std::uint8_t> plaintext);

} // namespace htsim
