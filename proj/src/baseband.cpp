#include "mmwsim/baseband.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace mmwsim {

namespace {

// 802.11 per-axis Gray: reflected Gray code of the level index.
int gray_axis_level(unsigned bits, int nbits)
{
    unsigned idx = bits;
    for (unsigned shift = bits >> 1; shift != 0; shift >>= 1) {
        idx ^= shift;
    }
    const int levels = 1 << nbits;
    return 2 * static_cast<int>(idx) - (levels - 1);
}

std::vector<Complex> build_constellation(Modulation m)
{
    const int bps = bits_per_symbol(m);
    const std::size_t size = std::size_t{1} << bps;
    std::vector<Complex> pts(size);
    for (std::size_t label = 0; label < size; ++label) {
        const auto l = static_cast<unsigned>(label);
        switch (m) {
        case Modulation::BPSK:
            pts[label] = {l ? 1.0 : -1.0, 0.0};
            break;
        case Modulation::QPSK: {
            const double i = (l >> 1) & 1u ? -1.0 : 1.0;
            const double q = l & 1u ? -1.0 : 1.0;
            pts[label] = Complex{i, q} / std::sqrt(2.0);
            break;
        }
        case Modulation::QAM16:
        case Modulation::QAM64: {
            const int half = bps / 2;
            const unsigned mask = (1u << half) - 1u;
            const double norm = m == Modulation::QAM16 ? std::sqrt(10.0) : std::sqrt(42.0);
            pts[label] = Complex{static_cast<double>(gray_axis_level(l >> half, half)),
                                 static_cast<double>(gray_axis_level(l & mask, half))}
                / norm;
            break;
        }
        }
    }
    return pts;
}

} // namespace

int bits_per_symbol(Modulation m)
{
    switch (m) {
    case Modulation::BPSK: return 1;
    case Modulation::QPSK: return 2;
    case Modulation::QAM16: return 4;
    case Modulation::QAM64: return 6;
    }
    return 0;
}

std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::BPSK: return "BPSK";
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM16: return "QAM16";
    case Modulation::QAM64: return "QAM64";
    }
    return "?";
}

std::optional<Modulation> parse_modulation(std::string_view name)
{
    for (auto m : {Modulation::BPSK, Modulation::QPSK, Modulation::QAM16, Modulation::QAM64}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    if (name == "16QAM") return Modulation::QAM16;
    if (name == "64QAM") return Modulation::QAM64;
    return std::nullopt;
}

std::span<const Complex> constellation(Modulation m)
{
    static const std::array<std::vector<Complex>, 4> tables{
        build_constellation(Modulation::BPSK), build_constellation(Modulation::QPSK),
        build_constellation(Modulation::QAM16), build_constellation(Modulation::QAM64)};
    return tables[static_cast<std::size_t>(m)];
}

SampleBuffer map_bits(std::span<const std::uint8_t> bits, Modulation m)
{
    const auto bps = static_cast<std::size_t>(bits_per_symbol(m));
    if (bits.size() % bps != 0) {
        throw LengthMismatch("map_bits: " + std::to_string(bits.size())
                             + " bits is not a multiple of " + std::to_string(bps));
    }
    const auto pts = constellation(m);
    SampleBuffer out;
    out.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        std::size_t label = 0;
        for (std::size_t b = 0; b < bps; ++b) {
            label = (label << 1) | (bits[i + b] & 1u);
        }
        out.push_back(pts[label]);
    }
    return out;
}

std::size_t nearest_label(Complex sample, Modulation m)
{
    constexpr double tie_eps = 1e-12;
    const auto pts = constellation(m);
    std::size_t best = 0;
    double best_d = std::norm(sample - pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = std::norm(sample - pts[i]);
        if (d < best_d - tie_eps) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

Complex nearest_point(Complex sample, Modulation m) { return constellation(m)[nearest_label(sample, m)]; }

Bits demap_hard(std::span<const Complex> symbols, Modulation m)
{
    const auto bps = bits_per_symbol(m);
    Bits out;
    out.reserve(symbols.size() * static_cast<std::size_t>(bps));
    for (const auto& s : symbols) {
        const std::size_t label = nearest_label(s, m);
        for (int b = bps - 1; b >= 0; --b) {
            out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
        }
    }
    return out;
}

double evm_db(std::span<const Complex> received, std::span<const Complex> reference)
{
    if (received.empty() || received.size() != reference.size()) {
        throw LengthMismatch("evm_db: inputs must be non-empty and of equal length");
    }
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < received.size(); ++i) {
        err += std::norm(received[i] - reference[i]);
        ref += std::norm(reference[i]);
    }
    if (ref <= 0.0) {
        throw InsufficientData("evm_db: reference has zero power");
    }
    if (err <= 0.0) {
        return kEvmFloorDb;
    }
    return std::max(kEvmFloorDb, 10.0 * std::log10(err / ref));
}

} // namespace mmwsim
