#ifndef MMWSIM_FFT_HPP
#define MMWSIM_FFT_HPP

#include "mmwsim/types.hpp"

#include <span>

namespace mmwsim::dsp {

bool is_power_of_two(std::size_t n);

/// In-place radix-2 transform scaled by 1/sqrt(N) in both directions, so
/// forward followed by inverse is the identity and Parseval holds exactly.
/// Throws GeometryError when the size is not a power of two.
void fft_unitary(std::span<Complex> data, bool inverse = false);

SampleBuffer fft(std::span<const Complex> data);
SampleBuffer ifft(std::span<const Complex> data);

// Signed subcarrier index (-N/2..N/2-1) to FFT bin (0..N-1) and back.
inline std::size_t bin_of(int k, std::size_t n)
{
    const auto sn = static_cast<long>(n);
    return static_cast<std::size_t>(((k % sn) + sn) % sn);
}

inline int signed_index(std::size_t bin, std::size_t n)
{
    return bin < n / 2 ? static_cast<int>(bin) : static_cast<int>(bin) - static_cast<int>(n);
}

} // namespace mmwsim::dsp

#endif // MMWSIM_FFT_HPP
