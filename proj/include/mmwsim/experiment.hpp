#ifndef MMWSIM_EXPERIMENT_HPP
#define MMWSIM_EXPERIMENT_HPP

#include "mmwsim/channel.hpp"
#include "mmwsim/linklayer.hpp"
#include "mmwsim/metrics.hpp"
#include "mmwsim/receiver.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace mmwsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProbeConfig {
    std::optional<double> tone_hz; // default fs/8
    std::size_t n_samples = 1'000'000;
    std::size_t pdf_bins = 101;
};

/// Everything one experiment run needs. Defaults reproduce the reference
/// setup: N=64, CP=16, 25 MHz, K=3, QPSK, sigma=0.26 rad, B_pn=1 MHz.
struct ExperimentConfig {
    ReceiverConfig phy;
    ChannelConfig channel;
    bool pnc_enabled = true;
    std::size_t n_frames = 200;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    ProbeConfig probe;
    std::vector<int> k_list{0, 1, 2, 3, 4, 5, 6, 8};

    nlohmann::json to_json() const;
};

/// Parses a JSON document; absent keys keep their defaults, unknown keys
/// and ill-typed values raise ConfigError naming the field (and the
/// line/column for syntax errors).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Same config with the guard count replaced; throws ConfigError on bad geometry.
ExperimentConfig with_guard_count(const ExperimentConfig& cfg, int k_guard);

struct FrameResult {
    double evm_db = 0.0;
    double genie_evm_db = 0.0;
    double residual_phase_std = 0.0;
    std::optional<PhaseTrackingReport> tracking; // PNC estimate vs true theta, payload bodies
    std::size_t bit_errors = 0;
    std::size_t erased_bins = 0;
    SampleBuffer points;
};

struct SimulationRun {
    std::vector<FrameResult> frames;
    std::size_t bits_per_frame = 0;
    // First frame's payload-body trace, for plotting estimate against truth.
    std::vector<double> trace_theta_true;
    std::vector<double> trace_theta_est;

    std::optional<double> mean_evm_db() const;
    nlohmann::json summary(const ExperimentConfig& cfg) const;
};

/// Frame i uses derive_seed(cfg.seed, i) for both its payload bits and its
/// channel, so runs differing only in pnc_enabled or K see the same draws.
SimulationRun run_simulation(const ExperimentConfig& cfg);
void write_simulation_outputs(const SimulationRun& run, const ExperimentConfig& cfg,
                              const std::filesystem::path& dir);

struct PhaseNoiseMeasurement {
    double tone_hz = 0.0;
    std::vector<double> theta_true;
    std::vector<double> theta_est;
    GaussianFit fit;
    Histogram pdf;
    std::optional<PsdEstimate> psd;
};

PhaseNoiseMeasurement run_measure_pn(const ExperimentConfig& cfg);
void write_measure_pn_outputs(const PhaseNoiseMeasurement& m, const ExperimentConfig& cfg,
                              const std::filesystem::path& dir);

struct KSweepRow {
    int k_guard = 0;
    std::optional<double> mean_evm_db;
};

std::vector<KSweepRow> run_sweep_k(const ExperimentConfig& cfg, std::span<const int> k_list);
void write_sweep_k_outputs(std::span<const KSweepRow> rows, const std::filesystem::path& dir);

StreamResult run_stream(const ExperimentConfig& cfg, std::span<const std::uint8_t> input);

} // namespace mmwsim

#endif // MMWSIM_EXPERIMENT_HPP
