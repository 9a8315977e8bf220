#include "mmwsim/linklayer.hpp"

#include "mmwsim/parallel.hpp"

#include <array>
#include <numeric>
#include <string>

namespace mmwsim {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table()
{
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

void put_u32(Bytes& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b)
{
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8
        | static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

Bytes header_and_payload(const Packet& p)
{
    Bytes out;
    out.reserve(kPacketHeaderBytes + p.payload.size());
    put_u32(out, p.seq);
    out.push_back(static_cast<std::uint8_t>(p.payload.size() & 0xFF));
    out.push_back(static_cast<std::uint8_t>(p.payload.size() >> 8));
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    return out;
}

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data)
{
    std::uint32_t c = 0xFFFFFFFFu;
    for (auto byte : data) {
        c = kCrcTable[(c ^ byte) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

std::uint32_t Packet::compute_crc() const { return mmwsim::crc32(header_and_payload(*this)); }

Bytes serialize(const Packet& p)
{
    Bytes out = header_and_payload(p);
    put_u32(out, p.crc32);
    return out;
}

std::optional<Packet> parse_packet(std::span<const std::uint8_t> bytes, std::size_t max_payload)
{
    if (bytes.size() < kPacketOverheadBytes) {
        return std::nullopt;
    }
    const std::size_t len = static_cast<std::size_t>(bytes[4]) | static_cast<std::size_t>(bytes[5]) << 8;
    if (len > max_payload || bytes.size() < kPacketOverheadBytes + len) {
        return std::nullopt;
    }
    Packet p;
    p.seq = get_u32(bytes);
    p.payload.assign(bytes.begin() + kPacketHeaderBytes, bytes.begin() + static_cast<std::ptrdiff_t>(kPacketHeaderBytes + len));
    p.crc32 = get_u32(bytes.subspan(kPacketHeaderBytes + len));
    return p;
}

std::vector<Packet> packetize(std::span<const std::uint8_t> bytes, std::size_t max_payload)
{
    if (max_payload == 0 || max_payload > kMaxPayloadLimit) {
        throw std::invalid_argument("packetize: max_payload must lie in [1, 65535]");
    }
    std::vector<Packet> out;
    out.reserve((bytes.size() + max_payload - 1) / max_payload);
    for (std::size_t off = 0; off < bytes.size(); off += max_payload) {
        Packet p;
        p.seq = static_cast<std::uint32_t>(out.size());
        const std::size_t len = std::min(max_payload, bytes.size() - off);
        p.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                         bytes.begin() + static_cast<std::ptrdiff_t>(off + len));
        p.crc32 = p.compute_crc();
        out.push_back(std::move(p));
    }
    return out;
}

std::string_view to_string(PacketStatus s)
{
    switch (s) {
    case PacketStatus::Ok: return "OK";
    case PacketStatus::CrcFail: return "CRC_FAIL";
    case PacketStatus::Missing: return "MISSING";
    }
    return "?";
}

DepacketizeResult depacketize(std::span<const Packet> received, std::size_t max_payload, std::size_t total_bytes)
{
    if (max_payload == 0) {
        throw std::invalid_argument("depacketize: max_payload must be positive");
    }
    const std::size_t expected = (total_bytes + max_payload - 1) / max_payload;
    DepacketizeResult out;
    out.bytes.assign(total_bytes, 0);
    out.status.assign(expected, PacketStatus::Missing);

    for (const auto& p : received) {
        if (p.seq >= expected || out.status[p.seq] == PacketStatus::Ok) {
            continue;
        }
        const std::size_t off = static_cast<std::size_t>(p.seq) * max_payload;
        const std::size_t slot_len = std::min(max_payload, total_bytes - off);
        if (!p.crc_ok() || p.payload.size() != slot_len) {
            out.status[p.seq] = PacketStatus::CrcFail;
            continue;
        }
        std::copy(p.payload.begin(), p.payload.end(), out.bytes.begin() + static_cast<std::ptrdiff_t>(off));
        out.status[p.seq] = PacketStatus::Ok;
    }
    return out;
}

nlohmann::json to_json(const StreamReport& r)
{
    return nlohmann::json{
        {"packets_sent", r.packets_sent},
        {"packets_ok", r.packets_ok},
        {"packets_crc_fail", r.packets_crc_fail},
        {"per", r.per},
        {"goodput_bits_per_channel_use", r.goodput_bits_per_channel_use},
        {"mean_evm_db", r.mean_evm_db ? nlohmann::json(*r.mean_evm_db) : nlohmann::json(nullptr)},
    };
}

Bits bytes_to_bits(std::span<const std::uint8_t> bytes)
{
    Bits bits;
    bits.reserve(bytes.size() * 8);
    for (auto b : bytes) {
        for (int i = 7; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((b >> i) & 1u));
    }
    return bits;
}

Bytes bits_to_bytes(std::span<const std::uint8_t> bits)
{
    Bytes out(bits.size() / 8, 0);
    for (std::size_t i = 0; i < out.size() * 8; ++i) {
        out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | ((bits[i] & 1u) << (7 - i % 8)));
    }
    return out;
}

std::size_t max_payload_for(const ReceiverConfig& phy)
{
    const std::size_t frame_bytes = frame_capacity_bits(phy.ofdm, phy.modulation, phy.n_payload_symbols) / 8;
    if (frame_bytes <= kPacketOverheadBytes) {
        throw GeometryError("frame capacity of " + std::to_string(frame_bytes)
                            + " bytes cannot hold a packet header and CRC");
    }
    return std::min(frame_bytes - kPacketOverheadBytes, kMaxPayloadLimit);
}

StreamResult stream_bytes(std::span<const std::uint8_t> bytes, const ReceiverConfig& phy,
                          const ChannelConfig& channel, bool pnc_enabled)
{
    phy.ofdm.validate();
    channel.validate();
    const std::size_t max_payload = max_payload_for(phy);
    const auto packets = packetize(bytes, max_payload);
    const std::size_t n = packets.size();

    std::vector<Packet> received(n);
    std::vector<double> evm(n, 0.0);
    std::vector<std::size_t> samples_used(n, 0);

    parallel_for(n, [&](std::size_t i) {
        const Bits bits = bytes_to_bits(serialize(packets[i]));
        const Frame frame = build_frame(bits, phy.modulation, phy.ofdm, phy.n_payload_symbols);
        const SampleBuffer tx = frame.samples();

        ChannelConfig frame_channel = channel;
        frame_channel.seed = derive_seed(channel.seed, i);
        const ChannelOutput rx = apply_channel(tx, frame_channel);

        const DecodeReport dec = decode_frame(rx.samples, phy, pnc_enabled);
        evm[i] = dec.evm_db;
        samples_used[i] = tx.size();

        const Bytes rx_bytes = bits_to_bytes(dec.bits);
        auto parsed = parse_packet(rx_bytes, max_payload);
        if (!parsed) {
            // Header destroyed; the genie frame index still identifies the slot.
            parsed = Packet{static_cast<std::uint32_t>(i), {}, 0};
        } else if (!parsed->crc_ok()) {
            parsed->seq = static_cast<std::uint32_t>(i);
        }
        received[i] = std::move(*parsed);
    });

    StreamResult result;
    auto reassembled = depacketize(received, max_payload, bytes.size());
    result.bytes = std::move(reassembled.bytes);
    result.status = std::move(reassembled.status);
    result.frame_evm_db = evm;

    StreamReport& r = result.report;
    r.packets_sent = n;
    std::size_t delivered = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (result.status[i] == PacketStatus::Ok) {
            ++r.packets_ok;
            delivered += packets[i].payload.size();
        } else if (result.status[i] == PacketStatus::CrcFail) {
            ++r.packets_crc_fail;
        }
    }
    r.per = n == 0 ? 0.0 : 1.0 - static_cast<double>(r.packets_ok) / static_cast<double>(n);
    const double channel_uses = static_cast<double>(std::accumulate(samples_used.begin(), samples_used.end(), std::size_t{0}));
    r.goodput_bits_per_channel_use = channel_uses > 0.0 ? 8.0 * static_cast<double>(delivered) / channel_uses : 0.0;
    if (n > 0) {
        r.mean_evm_db = std::accumulate(evm.begin(), evm.end(), 0.0) / static_cast<double>(n);
    }
    return result;
}

} // namespace mmwsim
