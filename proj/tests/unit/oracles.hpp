// Independent reference computations used only by tests.
#ifndef MMWSIM_TESTS_ORACLES_HPP
#define MMWSIM_TESTS_ORACLES_HPP

#include "mmwsim/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using mmwsim::Complex;

// O(N^2) DFT with 1/sqrt(N) scaling.
inline std::vector<Complex> dft(std::span<const Complex> x, bool inverse = false)
{
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        long double re = 0.0L;
        long double im = 0.0L;
        for (std::size_t t = 0; t < n; ++t) {
            const long double ang = sign * 2.0L * 3.141592653589793238462643383279L
                * static_cast<long double>((k * t) % n) / static_cast<long double>(n);
            re += x[t].real() * std::cos(ang) - x[t].imag() * std::sin(ang);
            im += x[t].real() * std::sin(ang) + x[t].imag() * std::cos(ang);
        }
        out[k] = Complex(static_cast<double>(re), static_cast<double>(im)) / std::sqrt(static_cast<double>(n));
    }
    return out;
}

// H(k) = sum_l h(l) e^{-j 2 pi k l / N}, unnormalized.
inline Complex freq_response(std::span<const Complex> taps, int k, std::size_t n)
{
    Complex acc{};
    for (std::size_t l = 0; l < taps.size(); ++l) {
        acc += taps[l] * std::polar(1.0, -2.0 * mmwsim::kPi * k * static_cast<double>(l) / static_cast<double>(n));
    }
    return acc;
}

// Bit-at-a-time CRC-32 straight from the polynomial (MSB-first shifting of the reflected form).
inline std::uint32_t crc32_bitwise(std::span<const std::uint8_t> data)
{
    std::uint32_t crc = 0xFFFFFFFFu;
    for (auto byte : data) {
        for (int bit = 0; bit < 8; ++bit) {
            const bool in = ((byte >> bit) & 1u) != ((crc & 1u) != 0);
            crc >>= 1;
            if (in) crc ^= 0xEDB88320u;
        }
    }
    return ~crc;
}

inline std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return bits;
}

inline std::vector<Complex> random_complex(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Complex> out(n);
    for (auto& c : out) c = Complex(nd(rng), nd(rng));
    return out;
}

inline double sample_std(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace oracle

#endif
