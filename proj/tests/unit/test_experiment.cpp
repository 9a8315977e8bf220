#include "mmwsim/experiment.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace mmwsim;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("mmwsim_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

ExperimentConfig impairments_off(std::size_t frames)
{
    return parse_config(R"({
        "channel": {"snr_db": null, "phase_noise": {"model": "NONE"}},
        "n_frames": )" + std::to_string(frames) + "}");
}

} // namespace

TEST_CASE("empty config keeps the defaults")
{
    const auto cfg = parse_config("{}");
    CHECK(cfg.phy.ofdm.n_fft() == 64);
    CHECK(cfg.phy.ofdm.cp_len == 16);
    CHECK(cfg.phy.ofdm.plan.k_guard == 3);
    CHECK(cfg.phy.modulation == Modulation::QPSK);
    CHECK(cfg.channel.phase_noise.sigma == 0.26);
    CHECK(cfg.channel.phase_noise.bandwidth_hz == 1e6);
    CHECK(cfg.pnc_enabled);
    CHECK(cfg.n_frames == 200);
}

TEST_CASE("config round trips through JSON")
{
    auto cfg = parse_config(R"({
        "phy": {"k_guard": 5, "n_payload_symbols": 7, "pilot_value": [0.0, 1.0]},
        "channel": {"taps": [1.0, [0.2, -0.1]], "snr_db": 22.5, "cfo_hz": 100.0,
                    "phase_noise": {"model": "RANDOM_WALK", "sigma": 0.1, "walk_span": 40}},
        "modulation": "QAM64", "seed": 12, "k_list": [0, 2]
    })");
    CHECK(cfg.phy.ofdm.plan.k_guard == 5);
    CHECK(cfg.phy.ofdm.plan.payload_indices.size() == 42);
    CHECK(cfg.channel.taps.size() == 2);
    CHECK(cfg.channel.taps[1] == Complex(0.2, -0.1));
    CHECK(cfg.phy.ofdm.pilot_value == Complex(0.0, 1.0));
    const auto again = parse_config(cfg.to_json().dump());
    CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("config errors name the offending field")
{
    auto message = [](const std::string& text) {
        try {
            (void)parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(R"({"channel": {"snr": 3}})").find("channel.snr") != std::string::npos);
    CHECK(message(R"({"channel": {"phase_noise": {"sigma": "big"}}})").find("channel.phase_noise.sigma") != std::string::npos);
    CHECK(message(R"({"modulation": "QAM256"})").find("modulation") != std::string::npos);
    CHECK(message(R"({"n_frames": -1})").find("n_frames") != std::string::npos);
    CHECK(message("{\n  \"seed\": 1,\n  oops\n}").find("line 3") != std::string::npos);
    CHECK(message(R"({"phy": {"k_guard": 26}})") != "no error");
    CHECK(message(R"({"phy": {"n_fft": 48}})") != "no error");
    CHECK(message(R"({"channel": {"taps": []}})") != "no error");
    CHECK(message(R"({"k_list": [1, 40]})") != "no error");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
    CHECK_THROWS_AS(with_guard_count(parse_config("{}"), -1), ConfigError);
}

TEST_CASE("simulation with impairments off is clean")
{
    const auto cfg = impairments_off(5);
    const auto run = run_simulation(cfg);
    REQUIRE(run.frames.size() == 5);
    for (const auto& f : run.frames) {
        CHECK(f.evm_db <= -100.0);
        CHECK(f.bit_errors == 0);
        REQUIRE(f.tracking.has_value());
        CHECK(f.tracking->rmse < 1e-9);
    }
    const auto s = run.summary(cfg);
    CHECK(s["ber"].get<double>() == 0.0);
    CHECK(s["bits"].get<std::size_t>() == 5 * run.bits_per_frame);
}

TEST_CASE("zero frames gives null statistics")
{
    const auto cfg = impairments_off(0);
    const auto run = run_simulation(cfg);
    CHECK(run.frames.empty());
    CHECK_FALSE(run.mean_evm_db().has_value());
    const auto s = run.summary(cfg);
    CHECK(s["evm_db"].is_null());
    CHECK(s["ber"].is_null());
    const auto dir = scratch_dir("zero");
    write_simulation_outputs(run, cfg, dir);
    CHECK(slurp(dir / "evm.csv") == "frame,evm_db,residual_phase_std\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("artifacts are byte identical for a fixed seed")
{
    auto cfg = parse_config(R"({"n_frames": 6, "seed": 5})");
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    write_simulation_outputs(run_simulation(cfg), cfg, a);
    write_simulation_outputs(run_simulation(cfg), cfg, b);
    for (const char* f : {"evm.csv", "constellation.csv", "phase_trace.csv", "summary.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
    cfg.seed = 6;
    CHECK(run_simulation(cfg).frames[0].evm_db != run_simulation(parse_config(R"({"n_frames": 1, "seed": 5})")).frames[0].evm_db);
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST_CASE("PNC on and off see the same channel draws")
{
    auto on = parse_config(R"({"n_frames": 4, "seed": 3})");
    auto off = on;
    off.pnc_enabled = false;
    const auto r_on = run_simulation(on);
    const auto r_off = run_simulation(off);
    CHECK(r_on.bits_per_frame == r_off.bits_per_frame);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r_on.frames[i].evm_db < r_off.frames[i].evm_db);
    CHECK_FALSE(r_off.frames[0].tracking.has_value());
}

TEST_CASE("measure-pn with phase noise switched off")
{
    for (const char* text : {R"({"channel": {"snr_db": null, "phase_noise": {"model": "NONE"}}, "probe": {"n_samples": 20000}})",
                             R"({"channel": {"snr_db": null, "phase_noise": {"sigma": 0.0}}, "probe": {"n_samples": 20000}})"}) {
        const auto cfg = parse_config(text);
        const auto m = run_measure_pn(cfg);
        CHECK(m.fit.sample_count == 20000);
        CHECK(std::abs(m.fit.mean) < 1e-12);
        CHECK(m.fit.std < 1e-9);
        REQUIRE(m.psd.has_value());
        const auto dir = scratch_dir("pn");
        write_measure_pn_outputs(m, cfg, dir);
        CHECK(slurp(dir / "pn_pdf.csv").starts_with("bin_center,density\n"));
        CHECK(slurp(dir / "pn_psd.csv").starts_with("freq_hz,power_db\n"));
        const auto fit = nlohmann::json::parse(slurp(dir / "pn_fit.json"));
        CHECK(fit["sample_count"].get<std::size_t>() == 20000);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("sweep-k writes one row per guard count")
{
    auto cfg = impairments_off(2);
    const std::vector<int> ks{0, 3};
    const auto rows = run_sweep_k(cfg, ks);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].k_guard == 0);
    CHECK(*rows[1].mean_evm_db <= -100.0);
    const auto dir = scratch_dir("ksweep");
    write_sweep_k_outputs(rows, dir);
    const auto text = slurp(dir / "ksweep.csv");
    CHECK(text.starts_with("K,mean_evm_db\n0,"));
    std::filesystem::remove_all(dir);
}
