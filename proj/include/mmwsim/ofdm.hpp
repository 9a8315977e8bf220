#ifndef MMWSIM_OFDM_HPP
#define MMWSIM_OFDM_HPP

#include "mmwsim/baseband.hpp"
#include "mmwsim/types.hpp"

#include <span>

namespace mmwsim {

/// Bin layout of one OFDM symbol. All index lists hold FFT bins (0..N-1);
/// negative subcarrier k lives in bin N+k. The pilot sits on DC with K
/// empty guard bins on each side; payload fills the rest of -used..+used.
struct SubcarrierPlan {
    std::size_t n_fft = 64;
    int k_guard = 3;
    std::size_t pilot_index = 0;
    int used_band = 26;
    std::vector<std::size_t> payload_indices; // ordered by signed subcarrier, ascending
    std::vector<std::size_t> guard_indices;
    std::vector<std::size_t> null_indices;    // outside the used band

    // Pilot followed by payload bins; what preamble and payload symbols occupy.
    std::vector<std::size_t> occupied_indices() const;
};

/// Throws GeometryError unless n_fft is a power of two and
/// 0 <= k_guard < used_band <= n_fft/2 - 1.
SubcarrierPlan build_plan(std::size_t n_fft, int k_guard, int used_band);

// Guard count from the phase-noise bandwidth: ceil(B_pn / spacing).
int guard_count_for_bandwidth(double bandwidth_hz, double subcarrier_spacing_hz);

struct OfdmConfig {
    SubcarrierPlan plan = build_plan(64, 3, 26);
    std::size_t cp_len = 16;
    double sample_rate = 25e6;
    Complex pilot_value{1.0, 0.0};

    std::size_t n_fft() const { return plan.n_fft; }
    std::size_t symbol_len() const { return plan.n_fft + cp_len; }
    double subcarrier_spacing() const { return sample_rate / static_cast<double>(plan.n_fft); }
    void validate() const;
};

/// IFFT (1/sqrt N) of a full bin vector followed by cyclic prefix insertion.
SampleBuffer modulate_symbol(std::span<const Complex> freq_data, const OfdmConfig& cfg);

// CP removal and forward FFT; buffer must be n_fft + cp_len long.
SampleBuffer demodulate_symbol(std::span<const Complex> time_samples, const OfdmConfig& cfg);

// Places payload points on the plan's payload bins and the pilot on DC.
SampleBuffer assemble_bins(std::span<const Complex> payload_points, const OfdmConfig& cfg);

/// Fixed pseudo-random +-1 training on pilot and payload bins, pilot = 1.
/// The value on a given subcarrier does not depend on K.
SampleBuffer training_bins(const OfdmConfig& cfg);

inline constexpr std::size_t kPreambleSymbols = 2;

struct Frame {
    std::vector<SampleBuffer> preamble_symbols;
    std::vector<SampleBuffer> payload_symbols;
    Bits payload_bits; // zero-padded to capacity
    Modulation modulation = Modulation::QPSK;

    std::size_t symbol_count() const { return preamble_symbols.size() + payload_symbols.size(); }
    SampleBuffer samples() const;
};

std::size_t frame_capacity_bits(const OfdmConfig& cfg, Modulation m, std::size_t n_payload_symbols);

/// Short inputs are zero-padded to the frame capacity; longer inputs throw
/// LengthMismatch.
Frame build_frame(std::span<const std::uint8_t> bits, Modulation m, const OfdmConfig& cfg,
                  std::size_t n_payload_symbols);

} // namespace mmwsim

#endif // MMWSIM_OFDM_HPP
