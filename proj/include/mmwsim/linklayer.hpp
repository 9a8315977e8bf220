#ifndef MMWSIM_LINKLAYER_HPP
#define MMWSIM_LINKLAYER_HPP

#include "mmwsim/channel.hpp"
#include "mmwsim/receiver.hpp"

#include <optional>
#include <span>

#include <nlohmann/json.hpp>

namespace mmwsim {

// CRC-32 (IEEE 802.3): reflected polynomial 0xEDB88320, init and final xor 0xFFFFFFFF.
std::uint32_t crc32(std::span<const std::uint8_t> data);

/// Wire layout, little endian:
///   seq u32 | payload_len u16 | payload | crc32 u32 (over seq..payload)
struct Packet {
    std::uint32_t seq = 0;
    Bytes payload;
    std::uint32_t crc32 = 0;

    std::uint16_t payload_len() const { return static_cast<std::uint16_t>(payload.size()); }
    std::uint32_t compute_crc() const;
    bool crc_ok() const { return compute_crc() == crc32; }
};

inline constexpr std::size_t kPacketHeaderBytes = 6;
inline constexpr std::size_t kPacketOverheadBytes = kPacketHeaderBytes + 4;
inline constexpr std::size_t kMaxPayloadLimit = 0xFFFF;

Bytes serialize(const Packet& p);

// nullopt when the buffer is too short for the declared length or the
// length exceeds max_payload. CRC is not checked here.
std::optional<Packet> parse_packet(std::span<const std::uint8_t> bytes, std::size_t max_payload);

// Sequential seq from 0; the last packet may be short. Empty input gives no packets.
std::vector<Packet> packetize(std::span<const std::uint8_t> bytes, std::size_t max_payload);

enum class PacketStatus { Ok, CrcFail, Missing };
std::string_view to_string(PacketStatus s);

struct DepacketizeResult {
    Bytes bytes;
    std::vector<PacketStatus> status; // one per expected seq
};

/// Reassembles a stream of total_bytes sent as ceil(total_bytes / max_payload)
/// packets. Slots without a CRC-valid packet are zero-filled and marked
/// CrcFail (a corrupted packet claimed the slot) or Missing.
DepacketizeResult depacketize(std::span<const Packet> received, std::size_t max_payload, std::size_t total_bytes);

struct StreamReport {
    std::size_t packets_sent = 0;
    std::size_t packets_ok = 0;
    std::size_t packets_crc_fail = 0;
    double per = 0.0;
    double goodput_bits_per_channel_use = 0.0;
    std::optional<double> mean_evm_db; // mean of per-frame EVM (dB); none when nothing was sent
};

nlohmann::json to_json(const StreamReport& r);

struct StreamResult {
    StreamReport report;
    Bytes bytes;
    std::vector<PacketStatus> status;
    std::vector<double> frame_evm_db;
};

// Largest payload one frame can carry after header and CRC.
std::size_t max_payload_for(const ReceiverConfig& phy);

/// One packet per PHY frame: packetize, build each frame, pass it through
/// the channel (frame i seeded by derive_seed(channel.seed, i)), decode, and
/// reassemble. Frames run in parallel; the result does not depend on scheduling.
StreamResult stream_bytes(std::span<const std::uint8_t> bytes, const ReceiverConfig& phy,
                          const ChannelConfig& channel, bool pnc_enabled);

Bits bytes_to_bits(std::span<const std::uint8_t> bytes);
Bytes bits_to_bytes(std::span<const std::uint8_t> bits);

} // namespace mmwsim

#endif // MMWSIM_LINKLAYER_HPP
