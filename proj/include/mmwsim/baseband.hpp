#ifndef MMWSIM_BASEBAND_HPP
#define MMWSIM_BASEBAND_HPP

#include "mmwsim/types.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace mmwsim {

enum class Modulation { BPSK, QPSK, QAM16, QAM64 };

int bits_per_symbol(Modulation m);
std::string_view to_string(Modulation m);
std::optional<Modulation> parse_modulation(std::string_view name);

/// Unit-average-energy constellation indexed by label. The label is the
/// symbol's bits read MSB first, so label 0b10 for QPSK is bits [1,0].
/// BPSK sits on the real axis (0 -> -1). QPSK uses (1 - 2b) per axis
/// scaled by 1/sqrt2. 16/64-QAM use the 802.11 per-axis Gray tables with
/// 1/sqrt10 and 1/sqrt42; the first half of the bits drive I.
std::span<const Complex> constellation(Modulation m);

SampleBuffer map_bits(std::span<const std::uint8_t> bits, Modulation m);

// Nearest-point decision. Equidistant candidates (within 1e-12) resolve to
// the smallest label.
std::size_t nearest_label(Complex sample, Modulation m);
Complex nearest_point(Complex sample, Modulation m);

Bits demap_hard(std::span<const Complex> symbols, Modulation m);

inline constexpr double kEvmFloorDb = -120.0;

/// 20*log10(rms(received - reference) / rms(reference)), floored at
/// kEvmFloorDb.
double evm_db(std::span<const Complex> received, std::span<const Complex> reference);

} // namespace mmwsim

#endif // MMWSIM_BASEBAND_HPP
