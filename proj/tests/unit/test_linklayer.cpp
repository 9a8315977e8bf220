#include "mmwsim/linklayer.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <string_view>

using namespace mmwsim;

namespace {

Bytes random_bytes(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 56);
    return out;
}

ChannelConfig clean_channel()
{
    ChannelConfig c;
    c.snr_db.reset();
    c.phase_noise.model = PhaseNoiseModel::None;
    return c;
}

} // namespace

TEST_CASE("CRC-32 check value and bitwise oracle")
{
    constexpr std::string_view check = "123456789";
    const Bytes data(check.begin(), check.end());
    CHECK(crc32(data) == 0xCBF43926u);
    CHECK(crc32(Bytes{}) == 0u);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto b = random_bytes(seed * 7 + 1, seed);
        CHECK(crc32(b) == oracle::crc32_bitwise(b));
    }
}

TEST_CASE("packet wire layout is little endian")
{
    Packet p{0x04030201u, {0xAA, 0xBB}, 0};
    p.crc32 = p.compute_crc();
    const auto wire = serialize(p);
    REQUIRE(wire.size() == 12);
    CHECK(wire[0] == 0x01);
    CHECK(wire[3] == 0x04);
    CHECK(wire[4] == 0x02);
    CHECK(wire[5] == 0x00);
    CHECK(wire[6] == 0xAA);
    CHECK(crc32(std::span(wire).first(8)) == p.crc32);
    CHECK(wire[8] == static_cast<std::uint8_t>(p.crc32 & 0xFF));

    const auto back = parse_packet(wire, 64);
    REQUIRE(back.has_value());
    CHECK(back->seq == p.seq);
    CHECK(back->payload == p.payload);
    CHECK(back->crc_ok());

    CHECK_FALSE(parse_packet(std::span(wire).first(9), 64).has_value());
    CHECK_FALSE(parse_packet(wire, 1).has_value());
}

TEST_CASE("packetize splits into max_payload chunks")
{
    const auto data = random_bytes(10, 1);
    const auto pk = packetize(data, 4);
    REQUIRE(pk.size() == 3);
    CHECK(pk[0].payload.size() == 4);
    CHECK(pk[1].payload.size() == 4);
    CHECK(pk[2].payload.size() == 2);
    for (std::uint32_t i = 0; i < 3; ++i) {
        CHECK(pk[i].seq == i);
        CHECK(pk[i].crc_ok());
    }
    CHECK(packetize(Bytes{}, 4).empty());
    CHECK_THROWS(packetize(data, 0));
    CHECK_THROWS(packetize(data, 65536));
}

TEST_CASE("1 MB round trip through the wire format")
{
    const auto data = random_bytes(1 << 20, 2);
    const std::size_t mp = 1500;
    std::vector<Packet> rx;
    for (const auto& p : packetize(data, mp)) rx.push_back(*parse_packet(serialize(p), mp));
    const auto out = depacketize(rx, mp, data.size());
    CHECK(out.bytes == data);
    CHECK(std::all_of(out.status.begin(), out.status.end(), [](auto s) { return s == PacketStatus::Ok; }));
}

TEST_CASE("corruption and loss are reported per slot")
{
    const auto data = random_bytes(40, 3);
    auto pk = packetize(data, 8);
    pk[1].payload[3] ^= 0x10;
    pk.erase(pk.begin() + 2);
    const auto out = depacketize(pk, 8, data.size());
    REQUIRE(out.status.size() == 5);
    CHECK(out.status[0] == PacketStatus::Ok);
    CHECK(out.status[1] == PacketStatus::CrcFail);
    CHECK(out.status[2] == PacketStatus::Missing);
    CHECK(out.status[3] == PacketStatus::Ok);
    for (std::size_t i = 8; i < 24; ++i) CHECK(out.bytes[i] == 0);
    for (std::size_t i = 24; i < 40; ++i) CHECK(out.bytes[i] == data[i]);
    CHECK(to_string(PacketStatus::CrcFail) == "CRC_FAIL");
    CHECK(to_string(PacketStatus::Missing) == "MISSING");
}

TEST_CASE("every single-bit error in a packet is detected")
{
    Packet p{7, random_bytes(64, 4), 0};
    p.crc32 = p.compute_crc();
    const auto wire = serialize(p);
    for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
        auto bad = wire;
        bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        const auto parsed = parse_packet(bad, 1000);
        const bool detected = !parsed || !parsed->crc_ok() || parsed->seq != p.seq;
        CHECK(detected);
    }
}

TEST_CASE("bit and byte conversion is MSB first")
{
    const Bytes b{0x80, 0x01};
    const auto bits = bytes_to_bits(b);
    CHECK(bits == Bits{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1});
    CHECK(bits_to_bytes(bits) == b);
    const auto data = random_bytes(300, 5);
    CHECK(bits_to_bytes(bytes_to_bits(data)) == data);
}

TEST_CASE("stream over a clean channel is byte exact")
{
    ReceiverConfig phy;
    CHECK(max_payload_for(phy) == frame_capacity_bits(phy.ofdm, phy.modulation, phy.n_payload_symbols) / 8 - 10);
    const auto data = random_bytes(5000, 6);
    const auto res = stream_bytes(data, phy, clean_channel(), true);
    CHECK(res.bytes == data);
    CHECK(res.report.packets_ok == res.report.packets_sent);
    CHECK(res.report.per == 0.0);
    CHECK(res.report.goodput_bits_per_channel_use > 0.0);
    CHECK(*res.report.mean_evm_db <= -100.0);

    const auto empty = stream_bytes(Bytes{}, phy, clean_channel(), true);
    CHECK(empty.report.packets_sent == 0);
    CHECK_FALSE(empty.report.mean_evm_db.has_value());
    CHECK(to_json(empty.report)["mean_evm_db"].is_null());
}

TEST_CASE("stream results are deterministic under impairments")
{
    ReceiverConfig phy;
    phy.modulation = Modulation::QAM16;
    ChannelConfig ch;
    ch.snr_db = 14.0;
    ch.seed = 99;
    const auto data = random_bytes(6000, 7);
    const auto a = stream_bytes(data, phy, ch, true);
    const auto b = stream_bytes(data, phy, ch, true);
    CHECK(a.bytes == b.bytes);
    CHECK(a.status == b.status);
    CHECK(a.frame_evm_db == b.frame_evm_db);
    CHECK(a.report.packets_ok + a.report.packets_crc_fail <= a.report.packets_sent);
    CHECK(a.report.per == doctest::Approx(1.0 - static_cast<double>(a.report.packets_ok) / a.report.packets_sent));
}
