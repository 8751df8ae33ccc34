#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace blesim {

// Link-layer CRC polynomial x^24 + x^10 + x^9 + x^6 + x^4 + x^3 + x + 1.
// Low 24 bits hold the coefficients below x^24.
inline constexpr std::uint32_t kCrc24Poly = 0x00065B;
inline constexpr std::uint32_t kCrc24InitDefault = 0xFFFFFF;

// Bits are fed LSB-first per byte (air transmission order) into an MSB-out
// shift register. The register is returned as a 24-bit value; bit 23 is the
// x^23 coefficient of the remainder.
inline std::uint32_t crc24(const std::uint8_t* data, std::size_t len,
                           std::uint32_t init = kCrc24InitDefault) {
    std::uint32_t reg = init & 0xFFFFFF;
    for (std::size_t i = 0; i < len; ++i) {
        const std::uint8_t byte = data[i];
        for (int b = 0; b < 8; ++b) {
            const std::uint32_t in = (byte >> b) & 1u;
            const std::uint32_t fb = in ^ ((reg >> 23) & 1u);
            reg = (reg << 1) & 0xFFFFFF;
            if (fb) reg ^= kCrc24Poly;
        }
    }
    return reg;
}

inline std::uint32_t crc24(const std::vector<std::uint8_t>& data,
                           std::uint32_t init = kCrc24InitDefault) {
    return crc24(data.data(), data.size(), init);
}

}  // namespace blesim
