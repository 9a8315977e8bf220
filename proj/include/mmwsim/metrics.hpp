#ifndef MMWSIM_METRICS_HPP
#define MMWSIM_METRICS_HPP

#include "mmwsim/types.hpp"

#include <iosfwd>
#include <span>

namespace mmwsim {

struct GaussianFit {
    double mean = 0.0;
    double std = 0.0;
    std::size_t sample_count = 0;
};

// Method of moments: sample mean and unbiased sample std. Needs >= 2 samples.
GaussianFit gaussian_fit(std::span<const double> samples);

/// Phase of a received tone relative to its nominal rotation, unwrapped and
/// mean-centered (a constant offset is indistinguishable from channel phase).
std::vector<double> extract_tone_phase(std::span<const Complex> y, double tone_hz, double fs);

std::vector<double> unwrap(std::span<const double> phase);

struct PsdEstimate {
    std::vector<double> freqs_hz; // ascending, [-fs/2, fs/2)
    std::vector<double> power_db; // 10*log10 of power per Hz
    std::size_t nfft = 0;
    double segment_overlap = 0.5;

    // Linear power per Hz for each frequency.
    std::vector<double> density() const;
    // Fraction of integrated power with |f| < cutoff_hz.
    double fraction_below(double cutoff_hz) const;
    // Integral of the density over frequency.
    double total_power() const;
};

inline constexpr std::size_t kWelchNfft = 4096;
inline constexpr double kWelchOverlap = 0.5;

/// Welch estimate: Hann-windowed segments, each with its own mean removed,
/// averaged periodograms scaled so the density integrates to the variance.
/// Throws InsufficientData when nfft exceeds the input length.
PsdEstimate psd_welch(std::span<const Complex> samples, double fs, std::size_t nfft = kWelchNfft,
                      double overlap = kWelchOverlap);
PsdEstimate psd_welch(std::span<const double> samples, double fs, std::size_t nfft = kWelchNfft,
                      double overlap = kWelchOverlap);

struct PhaseTrackingReport {
    double rmse = 0.0;
    double residual_std = 0.0;
};

// Both statistics use the difference wrapped to (-pi, pi].
PhaseTrackingReport phase_tracking_report(std::span<const double> theta_true, std::span<const double> theta_est);

struct Histogram {
    std::vector<double> bin_centers;
    std::vector<double> density; // integrates to 1 over the covered range
};

Histogram histogram_density(std::span<const double> samples, std::size_t bins, double lo, double hi);

// CSV writers; every file starts with a header row.
void write_psd_csv(std::ostream& os, const PsdEstimate& psd);
void write_histogram_csv(std::ostream& os, const Histogram& hist);

} // namespace mmwsim

#endif // MMWSIM_METRICS_HPP
