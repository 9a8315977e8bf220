#include "mmwsim/ofdm.hpp"

#include "mmwsim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace mmwsim {

std::vector<std::size_t> SubcarrierPlan::occupied_indices() const
{
    std::vector<std::size_t> out;
    out.reserve(payload_indices.size() + 1);
    out.push_back(pilot_index);
    out.insert(out.end(), payload_indices.begin(), payload_indices.end());
    return out;
}

SubcarrierPlan build_plan(std::size_t n_fft, int k_guard, int used_band)
{
    if (!dsp::is_power_of_two(n_fft) || n_fft < 4) {
        throw GeometryError("n_fft must be a power of two >= 4, got " + std::to_string(n_fft));
    }
    const int max_band = static_cast<int>(n_fft / 2) - 1;
    if (k_guard < 0 || k_guard >= used_band || used_band > max_band) {
        throw GeometryError("invalid plan geometry: need 0 <= k_guard (" + std::to_string(k_guard)
                            + ") < used_band (" + std::to_string(used_band)
                            + ") <= " + std::to_string(max_band));
    }

    SubcarrierPlan plan;
    plan.n_fft = n_fft;
    plan.k_guard = k_guard;
    plan.pilot_index = 0;
    plan.used_band = used_band;

    const int half = static_cast<int>(n_fft / 2);
    for (int k = -half; k < half; ++k) {
        const std::size_t bin = dsp::bin_of(k, n_fft);
        const int ak = std::abs(k);
        if (k == 0) {
            continue;
        }
        if (ak > used_band) {
            plan.null_indices.push_back(bin);
        } else if (ak <= k_guard) {
            plan.guard_indices.push_back(bin);
        } else {
            plan.payload_indices.push_back(bin);
        }
    }
    return plan;
}

int guard_count_for_bandwidth(double bandwidth_hz, double subcarrier_spacing_hz)
{
    if (!(subcarrier_spacing_hz > 0.0) || bandwidth_hz < 0.0) {
        throw std::invalid_argument("guard_count_for_bandwidth: invalid bandwidth or spacing");
    }
    return static_cast<int>(std::ceil(bandwidth_hz / subcarrier_spacing_hz - 1e-12));
}

void OfdmConfig::validate() const
{
    if (cp_len >= plan.n_fft) {
        throw GeometryError("cp_len must be smaller than n_fft");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("sample_rate must be positive");
    }
}

SampleBuffer modulate_symbol(std::span<const Complex> freq_data, const OfdmConfig& cfg)
{
    const std::size_t n = cfg.n_fft();
    if (freq_data.size() != n) {
        throw LengthMismatch("modulate_symbol: expected " + std::to_string(n) + " bins, got "
                             + std::to_string(freq_data.size()));
    }
    const SampleBuffer body = dsp::ifft(freq_data);
    SampleBuffer out;
    out.reserve(n + cfg.cp_len);
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

SampleBuffer demodulate_symbol(std::span<const Complex> time_samples, const OfdmConfig& cfg)
{
    if (time_samples.size() != cfg.symbol_len()) {
        throw LengthMismatch("demodulate_symbol: expected " + std::to_string(cfg.symbol_len())
                             + " samples, got " + std::to_string(time_samples.size()));
    }
    return dsp::fft(time_samples.subspan(cfg.cp_len));
}

SampleBuffer assemble_bins(std::span<const Complex> payload_points, const OfdmConfig& cfg)
{
    const auto& payload = cfg.plan.payload_indices;
    if (payload_points.size() != payload.size()) {
        throw LengthMismatch("assemble_bins: expected " + std::to_string(payload.size())
                             + " payload points, got " + std::to_string(payload_points.size()));
    }
    SampleBuffer bins(cfg.n_fft(), Complex{});
    bins[cfg.plan.pilot_index] = cfg.pilot_value;
    for (std::size_t i = 0; i < payload.size(); ++i) {
        bins[payload[i]] = payload_points[i];
    }
    return bins;
}

SampleBuffer training_bins(const OfdmConfig& cfg)
{
    constexpr std::uint32_t kTrainingSeed = 0x5eed7a1u;
    const std::size_t n = cfg.n_fft();

    // One raw draw per subcarrier in signed order; mt19937 output is fixed by the standard.
    std::mt19937 gen(kTrainingSeed);
    std::vector<double> sign_by_bin(n);
    const int half = static_cast<int>(n / 2);
    for (int k = -half; k < half; ++k) {
        sign_by_bin[dsp::bin_of(k, n)] = (gen() >> 31) ? -1.0 : 1.0;
    }

    SampleBuffer bins(n, Complex{});
    bins[cfg.plan.pilot_index] = Complex{1.0, 0.0};
    for (auto b : cfg.plan.payload_indices) {
        bins[b] = Complex{sign_by_bin[b], 0.0};
    }
    return bins;
}

SampleBuffer Frame::samples() const
{
    SampleBuffer out;
    std::size_t total = 0;
    for (const auto& s : preamble_symbols) total += s.size();
    for (const auto& s : payload_symbols) total += s.size();
    out.reserve(total);
    for (const auto& s : preamble_symbols) out.insert(out.end(), s.begin(), s.end());
    for (const auto& s : payload_symbols) out.insert(out.end(), s.begin(), s.end());
    return out;
}

std::size_t frame_capacity_bits(const OfdmConfig& cfg, Modulation m, std::size_t n_payload_symbols)
{
    return n_payload_symbols * cfg.plan.payload_indices.size()
        * static_cast<std::size_t>(bits_per_symbol(m));
}

Frame build_frame(std::span<const std::uint8_t> bits, Modulation m, const OfdmConfig& cfg,
                  std::size_t n_payload_symbols)
{
    cfg.validate();
    const std::size_t capacity = frame_capacity_bits(cfg, m, n_payload_symbols);
    if (bits.size() > capacity) {
        throw LengthMismatch("build_frame: " + std::to_string(bits.size())
                             + " bits exceed frame capacity " + std::to_string(capacity));
    }

    Frame frame;
    frame.modulation = m;
    frame.payload_bits.assign(bits.begin(), bits.end());
    frame.payload_bits.resize(capacity, 0);

    const SampleBuffer training = modulate_symbol(training_bins(cfg), cfg);
    frame.preamble_symbols.assign(kPreambleSymbols, training);

    const std::size_t per_symbol = capacity / std::max<std::size_t>(n_payload_symbols, 1);
    const std::span<const std::uint8_t> all(frame.payload_bits);
    for (std::size_t s = 0; s < n_payload_symbols; ++s) {
        const SampleBuffer points = map_bits(all.subspan(s * per_symbol, per_symbol), m);
        frame.payload_symbols.push_back(modulate_symbol(assemble_bins(points, cfg), cfg));
    }
    return frame;
}

} // namespace mmwsim
