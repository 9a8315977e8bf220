#include "mmwsim/metrics.hpp"

#include "mmwsim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace mmwsim {

GaussianFit gaussian_fit(std::span<const double> samples)
{
    if (samples.size() < 2) {
        throw InsufficientData("gaussian_fit: need at least 2 samples");
    }
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0)), samples.size()};
}

std::vector<double> unwrap(std::span<const double> phase)
{
    std::vector<double> out(phase.begin(), phase.end());
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double d = phase[i] - phase[i - 1];
        if (d > kPi) {
            offset -= 2.0 * kPi * std::round(d / (2.0 * kPi));
        } else if (d < -kPi) {
            offset += 2.0 * kPi * std::round(-d / (2.0 * kPi));
        }
        out[i] = phase[i] + offset;
    }
    return out;
}

std::vector<double> extract_tone_phase(std::span<const Complex> y, double tone_hz, double fs)
{
    if (y.empty()) {
        throw InsufficientData("extract_tone_phase: empty input");
    }
    if (!(fs > 0.0) || !(std::abs(tone_hz) < fs / 2.0)) {
        throw std::invalid_argument("extract_tone_phase: tone must lie inside (-fs/2, fs/2)");
    }
    std::vector<double> raw(y.size());
    const double step = 2.0 * kPi * tone_hz / fs;
    for (std::size_t n = 0; n < y.size(); ++n) {
        raw[n] = std::arg(y[n] * std::polar(1.0, -step * static_cast<double>(n)));
    }
    auto phase = unwrap(raw);
    double mean = 0.0;
    for (double v : phase) mean += v;
    mean /= static_cast<double>(phase.size());
    for (double& v : phase) v -= mean;
    return phase;
}

std::vector<double> PsdEstimate::density() const
{
    std::vector<double> out(power_db.size());
    std::transform(power_db.begin(), power_db.end(), out.begin(), [](double db) { return std::pow(10.0, db / 10.0); });
    return out;
}

double PsdEstimate::total_power() const
{
    if (freqs_hz.size() < 2) {
        return 0.0;
    }
    const double df = freqs_hz[1] - freqs_hz[0];
    double sum = 0.0;
    for (double d : density()) sum += d;
    return sum * df;
}

double PsdEstimate::fraction_below(double cutoff_hz) const
{
    const auto d = density();
    double below = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        total += d[i];
        if (std::abs(freqs_hz[i]) < cutoff_hz) {
            below += d[i];
        }
    }
    return total > 0.0 ? below / total : 0.0;
}

PsdEstimate psd_welch(std::span<const Complex> samples, double fs, std::size_t nfft, double overlap)
{
    if (!dsp::is_power_of_two(nfft)) {
        throw GeometryError("psd_welch: nfft must be a power of two");
    }
    if (nfft > samples.size()) {
        throw InsufficientData("psd_welch: nfft " + std::to_string(nfft) + " exceeds input length "
                               + std::to_string(samples.size()));
    }
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw std::invalid_argument("psd_welch: overlap must lie in [0, 1)");
    }

    std::vector<double> window(nfft);
    double window_power = 0.0;
    for (std::size_t i = 0; i < nfft; ++i) {
        // Periodic Hann.
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(nfft));
        window_power += window[i] * window[i];
    }

    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(nfft) * (1.0 - overlap))));
    std::vector<double> acc(nfft, 0.0);
    std::size_t segments = 0;
    SampleBuffer seg(nfft);
    for (std::size_t start = 0; start + nfft <= samples.size(); start += hop) {
        Complex mean{};
        for (std::size_t i = 0; i < nfft; ++i) mean += samples[start + i];
        mean /= static_cast<double>(nfft);
        for (std::size_t i = 0; i < nfft; ++i) {
            seg[i] = (samples[start + i] - mean) * window[i];
        }
        // Unitary transform, so |X|^2 sums to the windowed segment energy.
        dsp::fft_unitary(seg, false);
        for (std::size_t i = 0; i < nfft; ++i) acc[i] += std::norm(seg[i]);
        ++segments;
    }

    PsdEstimate psd;
    psd.nfft = nfft;
    psd.segment_overlap = overlap;
    psd.freqs_hz.resize(nfft);
    psd.power_db.resize(nfft);
    // sum_k |X_k|^2 = sum w^2 x^2 ; dividing by sum w^2 gives mean power, spread over fs.
    const double scale = static_cast<double>(nfft) / (window_power * fs * static_cast<double>(segments));
    const double df = fs / static_cast<double>(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        const std::size_t bin = (i + nfft / 2) % nfft; // fftshift
        psd.freqs_hz[i] = static_cast<double>(dsp::signed_index(bin, nfft)) * df;
        const double p = acc[bin] * scale;
        psd.power_db[i] = p > 0.0 ? 10.0 * std::log10(p) : -300.0;
    }
    return psd;
}

PsdEstimate psd_welch(std::span<const double> samples, double fs, std::size_t nfft, double overlap)
{
    SampleBuffer c(samples.begin(), samples.end());
    return psd_welch(std::span<const Complex>(c), fs, nfft, overlap);
}

PhaseTrackingReport phase_tracking_report(std::span<const double> theta_true, std::span<const double> theta_est)
{
    if (theta_true.size() != theta_est.size()) {
        throw LengthMismatch("phase_tracking_report: length mismatch");
    }
    if (theta_true.empty()) {
        return {};
    }
    const auto n = static_cast<double>(theta_true.size());
    std::vector<double> diff(theta_true.size());
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = wrap_phase(theta_true[i] - theta_est[i]);
        mean += diff[i];
        sq += diff[i] * diff[i];
    }
    mean /= n;
    double var = 0.0;
    for (double d : diff) var += (d - mean) * (d - mean);
    return {std::sqrt(sq / n), std::sqrt(var / n)};
}

Histogram histogram_density(std::span<const double> samples, std::size_t bins, double lo, double hi)
{
    if (bins == 0 || !(hi > lo)) {
        throw std::invalid_argument("histogram_density: need bins > 0 and hi > lo");
    }
    Histogram h;
    const double width = (hi - lo) / static_cast<double>(bins);
    h.bin_centers.resize(bins);
    h.density.assign(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
        h.bin_centers[i] = lo + (static_cast<double>(i) + 0.5) * width;
    }
    for (double v : samples) {
        if (v < lo || v >= hi) continue;
        auto idx = static_cast<std::size_t>((v - lo) / width);
        idx = std::min(idx, bins - 1);
        h.density[idx] += 1.0;
    }
    if (!samples.empty()) {
        const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
        for (double& d : h.density) d *= norm;
    }
    return h;
}

void write_psd_csv(std::ostream& os, const PsdEstimate& psd)
{
    os << "freq_hz,power_db\n";
    for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g}\n", psd.freqs_hz[i], psd.power_db[i]);
    }
}

void write_histogram_csv(std::ostream& os, const Histogram& hist)
{
    os << "bin_center,density\n";
    for (std::size_t i = 0; i < hist.bin_centers.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g}\n", hist.bin_centers[i], hist.density[i]);
    }
}

} // namespace mmwsim
