#include "mmwsim/fft.hpp"

#include <cmath>
#include <utility>

namespace mmwsim::dsp {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_unitary(std::span<Complex> data, bool inverse)
{
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw GeometryError("fft size must be a power of two, got " + std::to_string(n));
    }

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(data[i], data[j]);
        }
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                // Twiddles from std::polar per k keep the error flat for large N.
                const Complex w = std::polar(1.0, ang * static_cast<double>(k));
                const Complex u = data[i + k];
                const Complex v = data[i + k + half] * w;
                data[i + k] = u + v;
                data[i + k + half] = u - v;
            }
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& x : data) {
        x *= scale;
    }
}

SampleBuffer fft(std::span<const Complex> data)
{
    SampleBuffer out(data.begin(), data.end());
    fft_unitary(out, false);
    return out;
}

SampleBuffer ifft(std::span<const Complex> data)
{
    SampleBuffer out(data.begin(), data.end());
    fft_unitary(out, true);
    return out;
}

} // namespace mmwsim::dsp
