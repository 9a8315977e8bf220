#include "mmwsim/channel.hpp"

#include <cmath>
#include <string>

namespace mmwsim {

namespace {

constexpr std::uint64_t kPhaseStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

// PSD of two cascaded poles is 1/(1+(f/fc)^2)^2. With fc = B_pn/20 the
// density at B_pn is 52 dB below its low-frequency level.
constexpr double kCornerRatio = 20.0;

} // namespace

std::string_view to_string(PhaseNoiseModel m)
{
    switch (m) {
    case PhaseNoiseModel::FilteredGaussian: return "FILTERED_GAUSSIAN";
    case PhaseNoiseModel::RandomWalk: return "RANDOM_WALK";
    case PhaseNoiseModel::None: return "NONE";
    }
    return "?";
}

std::optional<PhaseNoiseModel> parse_phase_noise_model(std::string_view name)
{
    for (auto m : {PhaseNoiseModel::FilteredGaussian, PhaseNoiseModel::RandomWalk, PhaseNoiseModel::None}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

void PhaseNoiseConfig::validate(double sample_rate) const
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("phase_noise.sigma must be finite and >= 0");
    }
    if (model == PhaseNoiseModel::None) {
        return;
    }
    if (!(bandwidth_hz > 0.0) || !(bandwidth_hz < sample_rate / 2.0)) {
        throw std::invalid_argument("phase_noise.bandwidth_hz must lie in (0, sample_rate/2)");
    }
    if (model == PhaseNoiseModel::RandomWalk && walk_span == 0) {
        throw std::invalid_argument("phase_noise.walk_span must be positive");
    }
}

PhaseNoiseProcess::PhaseNoiseProcess(PhaseNoiseConfig config, double sample_rate, std::uint64_t seed)
    : config_(config), sample_rate_(sample_rate), rng_(seed)
{
    config_.validate(sample_rate_);
    if (config_.model != PhaseNoiseModel::FilteredGaussian) {
        return;
    }

    const double a = std::exp(-2.0 * kPi * corner_hz() / sample_rate_);
    const double b = 1.0 - a;
    const double one_minus_a2 = 1.0 - a * a;
    pole_ = a;

    // Stationary moments of (stage1, stage2) for unit-variance input.
    const double var1 = b * b / one_minus_a2;
    const double var2 = b * b * b * b * (1.0 + a * a) / (one_minus_a2 * one_minus_a2 * one_minus_a2);
    const double cov12 = b * b * b / (one_minus_a2 * one_minus_a2);
    scale_ = config_.sigma / std::sqrt(var2);

    stage1_ = std::sqrt(var1) * normal_(rng_);
    const double cond_var = std::max(0.0, var2 - cov12 * cov12 / var1);
    stage2_ = cov12 / var1 * stage1_ + std::sqrt(cond_var) * normal_(rng_);
}

double PhaseNoiseProcess::corner_hz() const { return config_.bandwidth_hz / kCornerRatio; }

double PhaseNoiseProcess::next()
{
    switch (config_.model) {
    case PhaseNoiseModel::None:
        return 0.0;
    case PhaseNoiseModel::RandomWalk:
        walk_ += config_.sigma / std::sqrt(static_cast<double>(config_.walk_span)) * normal_(rng_);
        return walk_;
    case PhaseNoiseModel::FilteredGaussian: {
        const double b = 1.0 - pole_;
        stage1_ = pole_ * stage1_ + b * normal_(rng_);
        stage2_ = pole_ * stage2_ + b * stage1_;
        return scale_ * stage2_;
    }
    }
    return 0.0;
}

std::vector<double> PhaseNoiseProcess::generate(std::size_t n)
{
    std::vector<double> out(n);
    for (auto& v : out) {
        v = next();
    }
    return out;
}

void ChannelConfig::validate() const
{
    if (taps.empty()) {
        throw std::invalid_argument("channel.taps must not be empty");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("channel.sample_rate must be positive");
    }
    if (snr_db && !std::isfinite(*snr_db)) {
        throw std::invalid_argument("channel.snr_db must be finite (use null for a noiseless channel)");
    }
    phase_noise.validate(sample_rate);
}

std::vector<Complex> normalize_taps(std::span<const Complex> taps)
{
    double energy = 0.0;
    for (const auto& h : taps) {
        energy += std::norm(h);
    }
    if (taps.empty() || !(energy > 0.0)) {
        throw std::invalid_argument("channel taps must have nonzero energy");
    }
    const double scale = 1.0 / std::sqrt(energy);
    std::vector<Complex> out(taps.begin(), taps.end());
    for (auto& h : out) {
        h *= scale;
    }
    return out;
}

bool exceeds_cyclic_prefix(const ChannelConfig& cfg, std::size_t cp_len) { return cfg.taps.size() > cp_len; }

ChannelOutput apply_channel_with_phase(std::span<const Complex> x, const ChannelConfig& cfg,
                                       std::span<const double> theta)
{
    if (x.empty()) {
        throw InsufficientData("apply_channel: empty input");
    }
    if (theta.size() != x.size()) {
        throw LengthMismatch("apply_channel: theta length differs from input length");
    }
    cfg.validate();
    const auto taps = normalize_taps(cfg.taps);

    ChannelOutput out;
    out.samples.resize(x.size());
    out.theta.assign(theta.begin(), theta.end());

    double signal_power = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        Complex acc{};
        const std::size_t lmax = std::min(taps.size(), n + 1);
        for (std::size_t l = 0; l < lmax; ++l) {
            acc += taps[l] * x[n - l];
        }
        signal_power += std::norm(acc);
        out.samples[n] = acc;
    }
    signal_power /= static_cast<double>(x.size());

    const double cfo_step = 2.0 * kPi * cfg.cfo_hz / cfg.sample_rate;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double phase = theta[n] + cfo_step * static_cast<double>(n);
        if (phase != 0.0) {
            out.samples[n] *= std::polar(1.0, phase);
        }
    }

    if (cfg.snr_db && signal_power > 0.0) {
        const double noise_var = signal_power / std::pow(10.0, *cfg.snr_db / 10.0);
        const double per_dim = std::sqrt(noise_var / 2.0);
        Rng rng(derive_seed(cfg.seed, kNoiseStream));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& y : out.samples) {
            const double re = normal(rng);
            const double im = normal(rng);
            y += per_dim * Complex{re, im};
        }
    }
    return out;
}

ChannelOutput apply_channel(std::span<const Complex> x, const ChannelConfig& cfg)
{
    if (x.empty()) {
        throw InsufficientData("apply_channel: empty input");
    }
    cfg.validate();
    PhaseNoiseProcess proc(cfg.phase_noise, cfg.sample_rate, derive_seed(cfg.seed, kPhaseStream));
    const auto theta = proc.generate(x.size());
    return apply_channel_with_phase(x, cfg, theta);
}

ChannelOutput single_tone_probe(double freq_hz, std::size_t duration, const ChannelConfig& cfg)
{
    if (!(std::abs(freq_hz) < cfg.sample_rate / 2.0)) {
        throw std::invalid_argument("single_tone_probe: tone " + std::to_string(freq_hz)
                                    + " Hz aliases at sample rate " + std::to_string(cfg.sample_rate));
    }
    if (duration == 0) {
        return {};
    }
    SampleBuffer x(duration);
    const double step = 2.0 * kPi * freq_hz / cfg.sample_rate;
    for (std::size_t n = 0; n < duration; ++n) {
        x[n] = std::polar(1.0, step * static_cast<double>(n));
    }
    return apply_channel(x, cfg);
}

} // namespace mmwsim
