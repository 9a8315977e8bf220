#ifndef MMWSIM_RECEIVER_HPP
#define MMWSIM_RECEIVER_HPP

#include "mmwsim/ofdm.hpp"

#include <optional>
#include <span>

namespace mmwsim {

struct ChannelEstimate {
    std::vector<std::size_t> bins; // occupied bins the estimate is defined on
    SampleBuffer h_freq;           // n_fft entries, zero outside `bins`
    double noise_floor_est = 0.0;  // per-bin noise variance from repeat differences
};

/// Least-squares estimate from the preamble: mean over repeats of Y(k)/T(k)
/// on pilot and payload bins. Throws if a training bin has zero magnitude.
ChannelEstimate estimate_channel_ls(std::span<const SampleBuffer> preamble_bins,
                                    std::span<const Complex> training, const SubcarrierPlan& plan);

struct EqualizedSymbol {
    SampleBuffer points;       // one per payload bin, zero where erased
    std::vector<bool> erased;
    std::size_t erased_count = 0;
};

// Bins with |H| below this fraction of max|H| are erased rather than divided.
inline constexpr double kErasureRatio = 1e-6;

EqualizedSymbol equalize(std::span<const Complex> bins, const ChannelEstimate& est, const SubcarrierPlan& plan);

struct ReceiverConfig {
    OfdmConfig ofdm;
    Modulation modulation = Modulation::QPSK;
    std::size_t n_payload_symbols = 20;
};

struct DecodeReport {
    Bits bits;
    double evm_db = kEvmFloorDb;           // decision-directed, all payload points
    std::optional<double> genie_evm_db;    // against the transmitted points, if known
    double residual_phase_std = 0.0;       // std over payload symbols of the equalized pilot phase
    std::vector<double> per_symbol_evm;
    std::vector<std::size_t> per_symbol_points;
    SampleBuffer points;                   // equalized payload points, symbol-major
    std::size_t erased_bins = 0;
    std::vector<double> phase_trajectory;  // PNC phase per payload body sample (empty without PNC)
};

/// Decodes a genie-aligned frame: 2 preamble symbols then n_payload_symbols.
/// With PNC enabled every symbol (preamble included) is de-rotated before its
/// FFT, so the channel rotation folded into each estimate cancels in Y/H.
DecodeReport decode_frame(std::span<const Complex> rx_samples, const ReceiverConfig& cfg, bool pnc_enabled,
                          std::optional<std::span<const std::uint8_t>> true_bits = std::nullopt);

// Point-count-weighted RMS combination of per-symbol EVM values.
double combine_evm_db(std::span<const double> per_symbol_evm, std::span<const std::size_t> counts);

} // namespace mmwsim

#endif // MMWSIM_RECEIVER_HPP
