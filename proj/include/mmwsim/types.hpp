#ifndef MMWSIM_TYPES_HPP
#define MMWSIM_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmwsim {

using Complex = std::complex<double>;
using SampleBuffer = std::vector<Complex>;

// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

inline constexpr double kPi = std::numbers::pi;

class LengthMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi)
{
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

} // namespace mmwsim

#endif // MMWSIM_TYPES_HPP
