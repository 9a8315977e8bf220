// Experiment runner: simulate | measure-pn | sweep-k | stream.
// Exit status: 0 success, 1 config error, 2 runtime error.

#include "mmwsim/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

mmwsim::Bytes read_input(const std::string& path)
{
    if (path == "-") {
        std::cin >> std::noskipws;
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot read input file " + path);
    }
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot write output file " + path.string());
    }
    os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mmWave OFDM link simulator with pilot/guard phase noise cancellation"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    app.add_option("--config", config_path, "JSON experiment config (defaults when omitted)");
    app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--out", out_dir, "Override the output directory");

    auto* simulate = app.add_subcommand("simulate", "Run n_frames link simulations; writes evm.csv, constellation.csv, summary.json");
    auto* measure = app.add_subcommand("measure-pn", "Single-tone phase-noise measurement; writes pn_pdf.csv, pn_psd.csv, pn_fit.json");
    auto* sweep = app.add_subcommand("sweep-k", "Mean EVM per guard count K; writes ksweep.csv");
    std::vector<int> k_list;
    sweep->add_option("--k", k_list, "Guard counts (defaults to config k_list)")->delimiter(',');
    auto* stream = app.add_subcommand("stream", "Send a byte stream over the link; writes the recovered bytes and stream_report.json");
    std::string input_path;
    std::string output_path;
    stream->add_option("--input", input_path, "Input file, or - for stdin")->required();
    stream->add_option("--output", output_path, "Recovered output file")->required();

    for (auto* sub : {simulate, measure, sweep, stream}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    mmwsim::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = mmwsim::load_config(config_path);
        }
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!k_list.empty()) {
            for (int k : k_list) (void)mmwsim::with_guard_count(cfg, k);
        }
    } catch (const mmwsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const std::filesystem::path dir(cfg.output_dir);
        if (mmwsim::exceeds_cyclic_prefix(cfg.channel, cfg.phy.ofdm.cp_len)) {
            std::cerr << fmt::format("warning: {} channel taps exceed the {}-sample cyclic prefix; expect ISI\n",
                                     cfg.channel.taps.size(), cfg.phy.ofdm.cp_len);
        }

        if (simulate->parsed()) {
            const auto run = mmwsim::run_simulation(cfg);
            mmwsim::write_simulation_outputs(run, cfg, dir);
            std::cout << run.summary(cfg).dump(2) << '\n';
        } else if (measure->parsed()) {
            const auto m = mmwsim::run_measure_pn(cfg);
            mmwsim::write_measure_pn_outputs(m, cfg, dir);
            std::cout << fmt::format("phase std {:.4f} rad, mean {:.4f} rad over {} samples\n", m.fit.std, m.fit.mean,
                                     m.fit.sample_count);
        } else if (sweep->parsed()) {
            const auto ks = k_list.empty() ? cfg.k_list : k_list;
            const auto rows = mmwsim::run_sweep_k(cfg, ks);
            mmwsim::write_sweep_k_outputs(rows, dir);
            for (const auto& r : rows) {
                std::cout << fmt::format("K={} mean_evm_db={}\n", r.k_guard,
                                         r.mean_evm_db ? fmt::format("{:.3f}", *r.mean_evm_db) : "nan");
            }
        } else if (stream->parsed()) {
            const auto input = read_input(input_path);
            const auto result = mmwsim::run_stream(cfg, input);
            write_file(output_path, result.bytes);
            const auto report = mmwsim::to_json(result.report).dump(2);
            std::filesystem::create_directories(dir);
            std::ofstream(dir / "stream_report.json", std::ios::binary) << report << '\n';
            std::cout << report << '\n';
        }
    } catch (const mmwsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
