#ifndef MMWSIM_PNC_HPP
#define MMWSIM_PNC_HPP

#include "mmwsim/ofdm.hpp"

#include <span>

namespace mmwsim {

struct PhaseEstimate {
    std::vector<double> per_sample_phase; // (-pi, pi], one per body sample
    SampleBuffer raw_complex;             // low-pass time signal before angle extraction
    std::size_t degenerate_samples = 0;
};

/// Magnitude below which the low-pass sample's angle is not trusted; such
/// samples inherit the previous sample's phase (0 for the first).
inline constexpr double kDegenerateMagnitude = 1e-9;

/// Per-symbol phase estimate from the pilot and guard bins.
/// Input is the CP-stripped body (n_fft samples). The body is transformed,
/// every bin outside subcarriers -K..K is zeroed, and the inverse transform
/// gives the phase trajectory.
PhaseEstimate estimate_phase(std::span<const Complex> body, const OfdmConfig& cfg);

// Same estimate starting from already-transformed bins.
PhaseEstimate estimate_phase_from_bins(std::span<const Complex> bins, const OfdmConfig& cfg);

// r(n) = y(n) * e^{-j phase(n)}
SampleBuffer cancel(std::span<const Complex> y, const PhaseEstimate& est);

/// CP strip, estimate, cancel. Returns the cleaned n_fft-sample body.
SampleBuffer pnc_symbol(std::span<const Complex> y_with_cp, const OfdmConfig& cfg);

} // namespace mmwsim

#endif // MMWSIM_PNC_HPP
