#ifndef MMWSIM_CHANNEL_HPP
#define MMWSIM_CHANNEL_HPP

#include "mmwsim/rng.hpp"
#include "mmwsim/types.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace mmwsim {

enum class PhaseNoiseModel { FilteredGaussian, RandomWalk, None };

std::string_view to_string(PhaseNoiseModel m);
std::optional<PhaseNoiseModel> parse_phase_noise_model(std::string_view name);

struct PhaseNoiseConfig {
    PhaseNoiseModel model = PhaseNoiseModel::FilteredGaussian;
    double sigma = 0.26;          // stationary std of theta, rad
    double bandwidth_hz = 1e6;    // B_pn
    std::size_t walk_span = 80;   // RandomWalk: samples over which the drift std reaches sigma

    void validate(double sample_rate) const;
};

/// Seeded generator for the combined oscillator phase theta(n).
///
/// FilteredGaussian drives two cascaded identical one-pole low-pass sections
/// with white Gaussian noise. The pole sits at bandwidth_hz / 20, which
/// places the PSD 52 dB below its low-frequency level at bandwidth_hz, so
/// nearly all of the phase power lies inside B_pn. The state starts in its
/// stationary distribution and the output is scaled to std sigma.
///
/// Calls continue the same sequence: generate(a) then generate(b) equals
/// generate(a + b) on a fresh instance with the same seed.
class PhaseNoiseProcess {
public:
    PhaseNoiseProcess(PhaseNoiseConfig config, double sample_rate, std::uint64_t seed);

    std::vector<double> generate(std::size_t n);

    const PhaseNoiseConfig& config() const { return config_; }
    double corner_hz() const;
    double pole() const { return pole_; }

private:
    double next();

    PhaseNoiseConfig config_;
    double sample_rate_;
    Rng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double pole_ = 0.0;
    double scale_ = 0.0;
    double stage1_ = 0.0;
    double stage2_ = 0.0;
    double walk_ = 0.0;
};

struct ChannelConfig {
    std::vector<Complex> taps{Complex{1.0, 0.0}};
    std::optional<double> snr_db = 35.0; // nullopt: noiseless
    PhaseNoiseConfig phase_noise;
    double cfo_hz = 0.0;
    double sample_rate = 25e6;
    std::uint64_t seed = 1;

    void validate() const;
};

// Taps scaled to unit energy. Throws on an empty or all-zero profile.
std::vector<Complex> normalize_taps(std::span<const Complex> taps);

// Multipath longer than the cyclic prefix induces ISI; allowed but worth flagging.
bool exceeds_cyclic_prefix(const ChannelConfig& cfg, std::size_t cp_len);

struct ChannelOutput {
    SampleBuffer samples;
    std::vector<double> theta; // ground-truth phase applied to each sample
};

/// y(n) = e^{j theta(n)} * sum_l h(l) x(n-l) * e^{j 2 pi cfo n / fs} + w(n).
/// The convolution is linear and truncated to the input length. Noise power
/// is set from the post-multipath, pre-phase-noise mean power over the whole
/// buffer. theta comes from a PhaseNoiseProcess seeded from cfg.seed.
ChannelOutput apply_channel(std::span<const Complex> x, const ChannelConfig& cfg);

// Same, with a caller-supplied theta (length must match x).
ChannelOutput apply_channel_with_phase(std::span<const Complex> x, const ChannelConfig& cfg,
                                       std::span<const double> theta);

// e^{j 2 pi f n / fs} for n in [0, duration) through apply_channel.
ChannelOutput single_tone_probe(double freq_hz, std::size_t duration, const ChannelConfig& cfg);

} // namespace mmwsim

#endif // MMWSIM_CHANNEL_HPP
