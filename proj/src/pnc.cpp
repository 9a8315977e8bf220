#include "mmwsim/pnc.hpp"

#include "mmwsim/fft.hpp"

#include <cmath>
#include <string>

namespace mmwsim {

PhaseEstimate estimate_phase_from_bins(std::span<const Complex> bins, const OfdmConfig& cfg)
{
    const std::size_t n = cfg.n_fft();
    if (bins.size() != n) {
        throw LengthMismatch("estimate_phase: expected " + std::to_string(n) + " bins, got "
                             + std::to_string(bins.size()));
    }

    const auto k = static_cast<std::size_t>(cfg.plan.k_guard);
    SampleBuffer kept(n, Complex{});
    for (std::size_t b = 0; b <= k; ++b) {
        kept[b] = bins[b];
    }
    for (std::size_t b = n - k; b < n; ++b) {
        kept[b] = bins[b];
    }
    dsp::fft_unitary(kept, true);

    PhaseEstimate est;
    est.per_sample_phase.resize(n);
    double previous = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(kept[i]) < kDegenerateMagnitude) {
            ++est.degenerate_samples;
            est.per_sample_phase[i] = previous;
        } else {
            est.per_sample_phase[i] = std::arg(kept[i]);
            if (est.per_sample_phase[i] == -kPi) {
                est.per_sample_phase[i] = kPi;
            }
        }
        previous = est.per_sample_phase[i];
    }
    est.raw_complex = std::move(kept);
    return est;
}

PhaseEstimate estimate_phase(std::span<const Complex> body, const OfdmConfig& cfg)
{
    if (body.size() != cfg.n_fft()) {
        throw LengthMismatch("estimate_phase: expected " + std::to_string(cfg.n_fft())
                             + " samples, got " + std::to_string(body.size()));
    }
    return estimate_phase_from_bins(dsp::fft(body), cfg);
}

SampleBuffer cancel(std::span<const Complex> y, const PhaseEstimate& est)
{
    if (y.size() != est.per_sample_phase.size()) {
        throw LengthMismatch("cancel: signal and phase estimate lengths differ");
    }
    SampleBuffer r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        r[i] = y[i] * std::polar(1.0, -est.per_sample_phase[i]);
    }
    return r;
}

SampleBuffer pnc_symbol(std::span<const Complex> y_with_cp, const OfdmConfig& cfg)
{
    if (y_with_cp.size() != cfg.symbol_len()) {
        throw LengthMismatch("pnc_symbol: expected " + std::to_string(cfg.symbol_len())
                             + " samples, got " + std::to_string(y_with_cp.size()));
    }
    const auto body = y_with_cp.subspan(cfg.cp_len);
    return cancel(body, estimate_phase(body, cfg));
}

} // namespace mmwsim
