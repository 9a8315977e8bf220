#include "mmwsim/fft.hpp"
#include "mmwsim/ofdm.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace mmwsim;

namespace {

void check_partition(const SubcarrierPlan& plan)
{
    std::multiset<std::size_t> all(plan.payload_indices.begin(), plan.payload_indices.end());
    all.insert(plan.guard_indices.begin(), plan.guard_indices.end());
    all.insert(plan.null_indices.begin(), plan.null_indices.end());
    all.insert(plan.pilot_index);
    REQUIRE(all.size() == plan.n_fft);
    std::size_t expect = 0;
    for (auto b : all) CHECK(b == expect++);
}

} // namespace

TEST_CASE("plan geometry for the reference layout")
{
    const auto plan = build_plan(64, 3, 26);
    // Enumerate -26..26 excluding DC and |k| <= 3.
    int count = 0;
    for (int k = -26; k <= 26; ++k) count += std::abs(k) > 3 ? 1 : 0;
    CHECK(count == 46);
    CHECK(plan.payload_indices.size() == 46);
    CHECK(plan.guard_indices.size() == 6);
    CHECK(plan.null_indices.size() == 11);
    CHECK(plan.pilot_index == 0);
    for (auto b : plan.payload_indices) {
        const int k = dsp::signed_index(b, 64);
        CHECK(std::abs(k) > 3);
        CHECK(std::abs(k) <= 26);
    }
    check_partition(plan);
    CHECK(dsp::signed_index(plan.payload_indices.front(), 64) == -26);
    CHECK(dsp::signed_index(plan.payload_indices.back(), 64) == 26);
}

TEST_CASE("plan edge cases")
{
    const auto k0 = build_plan(64, 0, 26);
    CHECK(k0.payload_indices.size() == 52);
    CHECK(k0.guard_indices.empty());
    check_partition(k0);

    for (int k = 0; k < 26; ++k) {
        const auto p = build_plan(64, k, 26);
        CHECK(p.payload_indices.size() == static_cast<std::size_t>(2 * 26 - 2 * k));
        check_partition(p);
    }

    CHECK_THROWS_AS(build_plan(64, 26, 26), GeometryError);
    CHECK_THROWS_AS(build_plan(64, -1, 26), GeometryError);
    CHECK_THROWS_AS(build_plan(64, 3, 32), GeometryError);
    CHECK_THROWS_AS(build_plan(48, 3, 20), GeometryError);
}

TEST_CASE("guard count from phase-noise bandwidth")
{
    CHECK(guard_count_for_bandwidth(1e6, 25e6 / 64) == 3);
    CHECK(guard_count_for_bandwidth(25e6 / 64 * 2, 25e6 / 64) == 2);
    CHECK(guard_count_for_bandwidth(0.0, 25e6 / 64) == 0);
}

TEST_CASE("modulate_symbol basics")
{
    const OfdmConfig cfg;
    const SampleBuffer zeros(64);
    const auto z = modulate_symbol(zeros, cfg);
    CHECK(z.size() == 80);
    for (const auto& s : z) CHECK(s == Complex{});

    SampleBuffer dc(64);
    dc[0] = 1.0;
    const auto d = modulate_symbol(dc, cfg);
    for (const auto& s : d) CHECK(std::abs(s - Complex(0.125, 0.0)) < 1e-15);

    CHECK_THROWS_AS(modulate_symbol(SampleBuffer(63), cfg), LengthMismatch);
    CHECK_THROWS_AS(demodulate_symbol(SampleBuffer(64), cfg), LengthMismatch);
}

TEST_CASE("cyclic prefix copies the tail")
{
    const OfdmConfig cfg;
    const auto bins = oracle::random_complex(64, 9);
    const auto t = modulate_symbol(bins, cfg);
    for (std::size_t i = 0; i < 16; ++i) CHECK(t[i] == t[64 + i]);
}

TEST_CASE("modulate/demodulate round trip and energy conservation")
{
    const OfdmConfig cfg;
    double worst = 0.0;
    double worst_energy = 0.0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const auto bins = oracle::random_complex(64, trial + 100);
        const auto t = modulate_symbol(bins, cfg);
        const auto back = demodulate_symbol(t, cfg);
        double ef = 0.0;
        double et = 0.0;
        for (std::size_t k = 0; k < 64; ++k) {
            worst = std::max(worst, std::abs(back[k] - bins[k]));
            ef += std::norm(bins[k]);
            et += std::norm(t[16 + k]);
        }
        worst_energy = std::max(worst_energy, std::abs(ef - et));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_energy < 1e-9);
}

TEST_CASE("delay within the cyclic prefix is a per-bin phase ramp")
{
    const OfdmConfig cfg;
    const auto bins = oracle::random_complex(64, 5);
    const auto t = modulate_symbol(bins, cfg);
    for (std::size_t d : {1u, 5u, 16u}) {
        // Pure delay of d samples, with the previous symbol's tail standing in for history.
        SampleBuffer delayed(t.size());
        for (std::size_t n = 0; n < t.size(); ++n) delayed[n] = n >= d ? t[n - d] : Complex{};
        const auto y = demodulate_symbol(delayed, cfg);
        const auto body = std::span<const Complex>(delayed).subspan(16);
        const auto brute = oracle::dft(body);
        for (int k = -32; k < 32; ++k) {
            const std::size_t b = dsp::bin_of(k, 64);
            const Complex ramp = std::polar(1.0, -2.0 * kPi * k * static_cast<double>(d) / 64.0);
            CHECK(std::abs(y[b] - bins[b] * ramp) < 1e-10);
            CHECK(std::abs(brute[b] - bins[b] * ramp) < 1e-10);
            // One-tap equalization with the known ramp recovers the payload.
            CHECK(std::abs(y[b] / ramp - bins[b]) < 1e-10);
        }
    }
}

TEST_CASE("training occupies pilot and payload bins only")
{
    const OfdmConfig cfg;
    const auto t = training_bins(cfg);
    CHECK(t[0] == Complex(1.0, 0.0));
    for (auto b : cfg.plan.payload_indices) CHECK(std::abs(std::abs(t[b]) - 1.0) < 1e-15);
    for (auto b : cfg.plan.guard_indices) CHECK(t[b] == Complex{});
    for (auto b : cfg.plan.null_indices) CHECK(t[b] == Complex{});

    // Same value on a subcarrier regardless of K.
    OfdmConfig k8;
    k8.plan = build_plan(64, 8, 26);
    const auto t8 = training_bins(k8);
    for (auto b : k8.plan.payload_indices) CHECK(t8[b] == t[b]);
}

TEST_CASE("build_frame layout")
{
    const OfdmConfig cfg;
    const auto bits = oracle::random_bits(92, 1);
    const Frame f = build_frame(bits, Modulation::QPSK, cfg, 1);
    CHECK(f.symbol_count() == 3);
    CHECK(f.payload_bits == bits);
    CHECK(frame_capacity_bits(cfg, Modulation::QPSK, 1) == 92);
    for (const auto& s : f.preamble_symbols) CHECK(s.size() == 80);
    CHECK(f.preamble_symbols[0] == f.preamble_symbols[1]);
    CHECK(f.samples().size() == 240);

    const auto bins = demodulate_symbol(f.payload_symbols[0], cfg);
    CHECK(std::abs(bins[0] - Complex(1.0, 0.0)) < 1e-12);
    for (auto b : cfg.plan.guard_indices) CHECK(std::abs(bins[b]) < 1e-12);
    SampleBuffer pts;
    for (auto b : cfg.plan.payload_indices) pts.push_back(bins[b]);
    CHECK(demap_hard(pts, Modulation::QPSK) == bits);
}

TEST_CASE("build_frame padding, degenerate and overflow cases")
{
    const OfdmConfig cfg;
    const Frame empty = build_frame({}, Modulation::QPSK, cfg, 0);
    CHECK(empty.symbol_count() == 2);
    CHECK(empty.payload_symbols.empty());

    const Bits short_bits(10, 1);
    const Frame padded = build_frame(short_bits, Modulation::QAM16, cfg, 2);
    CHECK(padded.payload_bits.size() == 2 * 46 * 4);
    for (std::size_t i = 10; i < padded.payload_bits.size(); ++i) CHECK(padded.payload_bits[i] == 0);

    CHECK_THROWS_AS(build_frame(Bits(93, 0), Modulation::QPSK, cfg, 1), LengthMismatch);
}

TEST_CASE("build_frame is deterministic")
{
    const OfdmConfig cfg;
    const auto bits = oracle::random_bits(46 * 6 * 3, 4);
    const auto a = build_frame(bits, Modulation::QAM64, cfg, 3).samples();
    const auto b = build_frame(bits, Modulation::QAM64, cfg, 3).samples();
    CHECK(a == b);
}
