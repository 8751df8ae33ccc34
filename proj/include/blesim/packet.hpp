#pragma once

#include <cstdint>
#include <vector>

#include "blesim/core.hpp"
#include "blesim/crc24.hpp"

namespace blesim {

enum class PacketKind { Data, Advertisement };

inline constexpr std::uint32_t kAdvertisingAccessAddress = 0x8E89BED6;
inline constexpr std::size_t kDataOverheadBytes = 10;  // preamble+AA+header+CRC
inline constexpr std::size_t kAdvOverheadBytes = 7;    // no CRC field on advertisements
inline constexpr std::size_t kMaxDataPayload = 37;     // total 10..47 bytes
inline constexpr std::size_t kMaxAdvPayload = 32;      // total 8..39 bytes

// Data-packet header flags (byte 0); byte 1 carries the payload length.
inline constexpr std::uint16_t kHdrSn = 0x01;
inline constexpr std::uint16_t kHdrNesn = 0x02;
inline constexpr std::uint16_t kHdrMoreData = 0x04;

// One on-air link-layer frame: preamble(1) + access address(4) + header(2) +
// payload + CRC(3, data kind only). Airtime is 8 us per byte at 1 Mbps.
struct LinkPacket {
    PacketKind kind = PacketKind::Data;
    std::uint8_t preamble = 0xAA;
    std::uint32_t access_address = 0;
    std::uint16_t header = 0;
    std::vector<std::uint8_t> payload;
    std::uint32_t crc = 0;

    std::size_t total_bytes() const {
        return payload.size() + (kind == PacketKind::Data ? kDataOverheadBytes
                                                          : kAdvOverheadBytes);
    }

    SimTime airtime_us() const { return 8 * total_bytes(); }

    bool sn() const { return header & kHdrSn; }
    bool nesn() const { return header & kHdrNesn; }
    bool more_data() const { return header & kHdrMoreData; }

    std::vector<std::uint8_t> crc_input() const {
        std::vector<std::uint8_t> bytes;
        bytes.reserve(2 + payload.size());
        bytes.push_back(static_cast<std::uint8_t>(header & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>(header >> 8));
        bytes.insert(bytes.end(), payload.begin(), payload.end());
        return bytes;
    }
};

inline LinkPacket make_data_packet(std::uint32_t access_address, bool sn, bool nesn,
                                   bool more_data, std::vector<std::uint8_t> payload,
                                   std::uint32_t crc_init = kCrc24InitDefault) {
    require(payload.size() <= kMaxDataPayload,
            "frame-length: data payload exceeds 37 bytes");
    LinkPacket p;
    p.kind = PacketKind::Data;
    p.access_address = access_address;
    p.header = static_cast<std::uint16_t>((sn ? kHdrSn : 0) | (nesn ? kHdrNesn : 0) |
                                          (more_data ? kHdrMoreData : 0) |
                                          (static_cast<std::uint16_t>(payload.size()) << 8));
    p.payload = std::move(payload);
    p.crc = crc24(p.crc_input(), crc_init);
    return p;
}

// Advertisements carry the advertiser's 4-byte address token in front of the
// application payload; they have no CRC or acknowledgment.
inline LinkPacket make_advertisement(std::uint32_t advertiser_address,
                                     std::vector<std::uint8_t> extra_payload = {}) {
    LinkPacket p;
    p.kind = PacketKind::Advertisement;
    p.access_address = kAdvertisingAccessAddress;
    p.payload.reserve(4 + extra_payload.size());
    for (int i = 0; i < 4; ++i)
        p.payload.push_back(static_cast<std::uint8_t>(advertiser_address >> (8 * i)));
    p.payload.insert(p.payload.end(), extra_payload.begin(), extra_payload.end());
    require(p.payload.size() >= 1 && p.payload.size() <= kMaxAdvPayload,
            "frame-length: advertisement payload outside 1-32 bytes");
    p.header = static_cast<std::uint16_t>(static_cast<std::uint16_t>(p.payload.size()) << 8);
    return p;
}

inline std::uint32_t advertiser_address_of(const LinkPacket& adv) {
    std::uint32_t a = 0;
    for (int i = 0; i < 4 && i < static_cast<int>(adv.payload.size()); ++i)
        a |= static_cast<std::uint32_t>(adv.payload[i]) << (8 * i);
    return a;
}

inline bool verify_crc(const LinkPacket& p, std::uint32_t crc_init = kCrc24InitDefault) {
    if (p.kind != PacketKind::Data) return true;
    return crc24(p.crc_input(), crc_init) == p.crc;
}

}  // namespace blesim
