#include "mmwsim/experiment.hpp"

#include "mmwsim/parallel.hpp"
#include "mmwsim/pnc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace mmwsim {

namespace {

using nlohmann::json;

// Walks one JSON object, remembers which keys were consumed and rejects the rest.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) {
            throw ConfigError(fmt::format("field '{}': expected an object", path_.empty() ? "<root>" : path_));
        }
    }

    ~ObjectReader() = default;

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(fmt::format("field '{}': expected a number", field(key)));
            out = v->get<double>();
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                throw ConfigError(fmt::format("field '{}': expected a number or null", field(key)));
            }
        }
    }

    template <class T>
    void unsigned_int(const std::string& key, T& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) {
                throw ConfigError(fmt::format("field '{}': expected a non-negative integer", field(key)));
            }
            out = v->get<T>();
        }
    }

    void integer(const std::string& key, int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(fmt::format("field '{}': expected an integer", field(key)));
            out = v->get<int>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(fmt::format("field '{}': expected true or false", field(key)));
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(fmt::format("field '{}': expected a string", field(key)));
            out = v->get<std::string>();
        }
    }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ConfigError(fmt::format("field '{}': unknown key", field(it.key())));
            }
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

Complex parse_complex(const json& v, const std::string& field)
{
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError(fmt::format("field '{}': expected a number or [re, im]", field));
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

std::string num(double v) { return fmt::format("{:.17g}", v); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open output file " + path.string());
    }
    return os;
}

std::optional<double> mean_of(const std::vector<double>& v)
{
    if (v.empty()) return std::nullopt;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

json ExperimentConfig::to_json() const
{
    json taps = json::array();
    for (const auto& h : channel.taps) taps.push_back(complex_json(h));
    json klist = json::array();
    for (int k : k_list) klist.push_back(k);
    return json{
        {"phy",
         {{"n_fft", phy.ofdm.plan.n_fft},
          {"cp_len", phy.ofdm.cp_len},
          {"sample_rate", phy.ofdm.sample_rate},
          {"k_guard", phy.ofdm.plan.k_guard},
          {"used_band", phy.ofdm.plan.used_band},
          {"n_payload_symbols", phy.n_payload_symbols},
          {"pilot_value", complex_json(phy.ofdm.pilot_value)}}},
        {"channel",
         {{"taps", taps},
          {"snr_db", optional_json(channel.snr_db)},
          {"cfo_hz", channel.cfo_hz},
          {"phase_noise",
           {{"model", std::string(to_string(channel.phase_noise.model))},
            {"sigma", channel.phase_noise.sigma},
            {"bandwidth_hz", channel.phase_noise.bandwidth_hz},
            {"walk_span", channel.phase_noise.walk_span}}}}},
        {"modulation", std::string(to_string(phy.modulation))},
        {"n_frames", n_frames},
        {"pnc_enabled", pnc_enabled},
        {"seed", seed},
        {"output_dir", output_dir},
        {"probe", {{"tone_hz", optional_json(probe.tone_hz)}, {"n_samples", probe.n_samples}, {"pdf_bins", probe.pdf_bins}}},
        {"k_list", klist},
    };
}

ExperimentConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    ObjectReader root(doc, "");

    std::size_t n_fft = cfg.phy.ofdm.plan.n_fft;
    int k_guard = cfg.phy.ofdm.plan.k_guard;
    int used_band = cfg.phy.ofdm.plan.used_band;

    if (const json* phy = root.find("phy")) {
        ObjectReader r(*phy, "phy");
        r.unsigned_int("n_fft", n_fft);
        r.unsigned_int("cp_len", cfg.phy.ofdm.cp_len);
        r.number("sample_rate", cfg.phy.ofdm.sample_rate);
        r.integer("k_guard", k_guard);
        r.integer("used_band", used_band);
        r.unsigned_int("n_payload_symbols", cfg.phy.n_payload_symbols);
        if (const json* pv = r.find("pilot_value")) {
            cfg.phy.ofdm.pilot_value = parse_complex(*pv, r.field("pilot_value"));
        }
        r.finish();
    }

    if (const json* ch = root.find("channel")) {
        ObjectReader r(*ch, "channel");
        if (const json* taps = r.find("taps")) {
            if (!taps->is_array() || taps->empty()) {
                throw ConfigError("field 'channel.taps': expected a non-empty array");
            }
            cfg.channel.taps.clear();
            for (std::size_t i = 0; i < taps->size(); ++i) {
                cfg.channel.taps.push_back(parse_complex((*taps)[i], fmt::format("channel.taps[{}]", i)));
            }
        }
        r.optional_number("snr_db", cfg.channel.snr_db);
        r.number("cfo_hz", cfg.channel.cfo_hz);
        if (const json* pn = r.find("phase_noise")) {
            ObjectReader p(*pn, "channel.phase_noise");
            std::string model(to_string(cfg.channel.phase_noise.model));
            p.string("model", model);
            const auto parsed = parse_phase_noise_model(model);
            if (!parsed) {
                throw ConfigError(fmt::format("field 'channel.phase_noise.model': unknown model '{}' "
                                              "(FILTERED_GAUSSIAN, RANDOM_WALK, NONE)", model));
            }
            cfg.channel.phase_noise.model = *parsed;
            p.number("sigma", cfg.channel.phase_noise.sigma);
            p.number("bandwidth_hz", cfg.channel.phase_noise.bandwidth_hz);
            p.unsigned_int("walk_span", cfg.channel.phase_noise.walk_span);
            p.finish();
        }
        r.finish();
    }

    std::string modulation(to_string(cfg.phy.modulation));
    root.string("modulation", modulation);
    const auto mod = parse_modulation(modulation);
    if (!mod) {
        throw ConfigError(fmt::format("field 'modulation': unknown modulation '{}' (BPSK, QPSK, QAM16, QAM64)", modulation));
    }
    cfg.phy.modulation = *mod;

    root.unsigned_int("n_frames", cfg.n_frames);
    root.boolean("pnc_enabled", cfg.pnc_enabled);
    root.unsigned_int("seed", cfg.seed);
    root.string("output_dir", cfg.output_dir);

    if (const json* probe = root.find("probe")) {
        ObjectReader r(*probe, "probe");
        r.optional_number("tone_hz", cfg.probe.tone_hz);
        r.unsigned_int("n_samples", cfg.probe.n_samples);
        r.unsigned_int("pdf_bins", cfg.probe.pdf_bins);
        r.finish();
    }

    if (const json* kl = root.find("k_list")) {
        if (!kl->is_array()) throw ConfigError("field 'k_list': expected an array of integers");
        cfg.k_list.clear();
        for (const auto& v : *kl) {
            if (!v.is_number_integer()) throw ConfigError("field 'k_list': expected an array of integers");
            cfg.k_list.push_back(v.get<int>());
        }
    }
    root.finish();

    try {
        cfg.phy.ofdm.plan = build_plan(n_fft, k_guard, used_band);
        cfg.phy.ofdm.validate();
        cfg.channel.sample_rate = cfg.phy.ofdm.sample_rate;
        cfg.channel.validate();
        for (int k : cfg.k_list) {
            (void)build_plan(n_fft, k, used_band);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.probe.pdf_bins == 0) {
        throw ConfigError("field 'probe.pdf_bins': must be positive");
    }
    if (cfg.probe.tone_hz && !(std::abs(*cfg.probe.tone_hz) < cfg.phy.ofdm.sample_rate / 2.0)) {
        throw ConfigError("field 'probe.tone_hz': tone must lie inside (-fs/2, fs/2)");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream ss;
    ss << is.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ExperimentConfig with_guard_count(const ExperimentConfig& cfg, int k_guard)
{
    ExperimentConfig out = cfg;
    try {
        out.phy.ofdm.plan = build_plan(cfg.phy.ofdm.plan.n_fft, k_guard, cfg.phy.ofdm.plan.used_band);
    } catch (const GeometryError& e) {
        throw ConfigError(e.what());
    }
    return out;
}

std::optional<double> SimulationRun::mean_evm_db() const
{
    std::vector<double> v;
    for (const auto& f : frames) v.push_back(f.evm_db);
    return mean_of(v);
}

json SimulationRun::summary(const ExperimentConfig& cfg) const
{
    std::vector<double> genie;
    std::vector<double> residual;
    std::vector<double> tracking;
    std::size_t bit_errors = 0;
    std::size_t frame_errors = 0;
    std::size_t erased = 0;
    for (const auto& f : frames) {
        genie.push_back(f.genie_evm_db);
        residual.push_back(f.residual_phase_std);
        if (f.tracking) tracking.push_back(f.tracking->residual_std);
        bit_errors += f.bit_errors;
        frame_errors += f.bit_errors > 0 ? 1 : 0;
        erased += f.erased_bins;
    }
    const std::size_t total_bits = bits_per_frame * frames.size();
    return json{
        {"n_frames", frames.size()},
        {"modulation", std::string(to_string(cfg.phy.modulation))},
        {"pnc_enabled", cfg.pnc_enabled},
        {"k_guard", cfg.phy.ofdm.plan.k_guard},
        {"seed", cfg.seed},
        {"evm_db", optional_json(mean_evm_db())},
        {"genie_evm_db", optional_json(mean_of(genie))},
        {"residual_phase_std", optional_json(mean_of(residual))},
        {"tracking_residual_std", optional_json(mean_of(tracking))},
        {"bits", total_bits},
        {"bit_errors", bit_errors},
        {"ber", total_bits ? json(static_cast<double>(bit_errors) / static_cast<double>(total_bits)) : json(nullptr)},
        {"frame_error_rate",
         frames.empty() ? json(nullptr) : json(static_cast<double>(frame_errors) / static_cast<double>(frames.size()))},
        {"erased_bins", erased},
    };
}

SimulationRun run_simulation(const ExperimentConfig& cfg)
{
    const ReceiverConfig& phy = cfg.phy;
    phy.ofdm.validate();
    const std::size_t capacity = frame_capacity_bits(phy.ofdm, phy.modulation, phy.n_payload_symbols);
    const std::size_t sym_len = phy.ofdm.symbol_len();

    SimulationRun run;
    run.bits_per_frame = capacity;
    run.frames.resize(cfg.n_frames);
    std::vector<std::vector<double>> trace_true(cfg.n_frames > 0 ? 1 : 0);
    std::vector<std::vector<double>> trace_est(cfg.n_frames > 0 ? 1 : 0);

    parallel_for(cfg.n_frames, [&](std::size_t i) {
        const std::uint64_t frame_seed = derive_seed(cfg.seed, i);
        Rng rng(derive_seed(frame_seed, 100));
        Bits bits(capacity);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);

        const Frame frame = build_frame(bits, phy.modulation, phy.ofdm, phy.n_payload_symbols);
        ChannelConfig channel = cfg.channel;
        channel.sample_rate = phy.ofdm.sample_rate;
        channel.seed = frame_seed;
        const ChannelOutput rx = apply_channel(frame.samples(), channel);

        const DecodeReport dec = decode_frame(rx.samples, phy, cfg.pnc_enabled, std::span<const std::uint8_t>(bits));

        FrameResult& fr = run.frames[i];
        fr.evm_db = dec.evm_db;
        fr.genie_evm_db = dec.genie_evm_db.value_or(kEvmFloorDb);
        fr.residual_phase_std = dec.residual_phase_std;
        fr.erased_bins = dec.erased_bins;
        fr.points = dec.points;
        for (std::size_t b = 0; b < capacity; ++b) {
            fr.bit_errors += dec.bits[b] != bits[b] ? 1 : 0;
        }

        if (cfg.pnc_enabled) {
            std::vector<double> truth;
            truth.reserve(dec.phase_trajectory.size());
            for (std::size_t s = 0; s < phy.n_payload_symbols; ++s) {
                const std::size_t start = (kPreambleSymbols + s) * sym_len + phy.ofdm.cp_len;
                truth.insert(truth.end(), rx.theta.begin() + static_cast<std::ptrdiff_t>(start),
                             rx.theta.begin() + static_cast<std::ptrdiff_t>(start + phy.ofdm.n_fft()));
            }
            fr.tracking = phase_tracking_report(truth, dec.phase_trajectory);
            if (i == 0) {
                trace_true[0] = std::move(truth);
                trace_est[0] = dec.phase_trajectory;
            }
        }
    });

    if (!trace_true.empty()) {
        run.trace_theta_true = std::move(trace_true[0]);
        run.trace_theta_est = std::move(trace_est[0]);
    }
    return run;
}

void write_simulation_outputs(const SimulationRun& run, const ExperimentConfig& cfg, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        auto os = open_output(dir / "evm.csv");
        os << "frame,evm_db,residual_phase_std\n";
        for (std::size_t i = 0; i < run.frames.size(); ++i) {
            os << i << ',' << num(run.frames[i].evm_db) << ',' << num(run.frames[i].residual_phase_std) << '\n';
        }
    }
    {
        auto os = open_output(dir / "constellation.csv");
        os << "re,im\n";
        for (const auto& f : run.frames) {
            for (const auto& p : f.points) os << num(p.real()) << ',' << num(p.imag()) << '\n';
        }
    }
    {
        auto os = open_output(dir / "phase_trace.csv");
        os << "sample,theta_true,theta_est\n";
        for (std::size_t i = 0; i < run.trace_theta_true.size(); ++i) {
            os << i << ',' << num(run.trace_theta_true[i]) << ',' << num(run.trace_theta_est[i]) << '\n';
        }
    }
    auto os = open_output(dir / "summary.json");
    os << run.summary(cfg).dump(2) << '\n';
}

PhaseNoiseMeasurement run_measure_pn(const ExperimentConfig& cfg)
{
    PhaseNoiseMeasurement m;
    const double fs = cfg.phy.ofdm.sample_rate;
    m.tone_hz = cfg.probe.tone_hz.value_or(fs / 8.0);

    ChannelConfig channel = cfg.channel;
    channel.sample_rate = fs;
    channel.seed = derive_seed(cfg.seed, 0x70'6e'00ull);
    const ChannelOutput probe = single_tone_probe(m.tone_hz, cfg.probe.n_samples, channel);
    m.theta_true = probe.theta;
    if (probe.samples.empty()) {
        return m;
    }
    m.theta_est = extract_tone_phase(probe.samples, m.tone_hz, fs);
    if (m.theta_est.size() >= 2) {
        m.fit = gaussian_fit(m.theta_est);
    } else {
        m.fit = {m.theta_est.front(), 0.0, 1};
    }

    const double half_range = std::max(5.0 * m.fit.std, 0.01);
    m.pdf = histogram_density(m.theta_est, cfg.probe.pdf_bins, m.fit.mean - half_range, m.fit.mean + half_range);

    std::size_t nfft = kWelchNfft;
    while (nfft > m.theta_est.size()) nfft /= 2;
    if (nfft >= 2) {
        m.psd = psd_welch(m.theta_est, fs, nfft);
    }
    return m;
}

void write_measure_pn_outputs(const PhaseNoiseMeasurement& m, const ExperimentConfig& cfg,
                              const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        auto os = open_output(dir / "pn_pdf.csv");
        write_histogram_csv(os, m.pdf);
    }
    {
        auto os = open_output(dir / "pn_psd.csv");
        if (m.psd) {
            write_psd_csv(os, *m.psd);
        } else {
            os << "freq_hz,power_db\n";
        }
    }
    const double bw = cfg.channel.phase_noise.bandwidth_hz;
    json fit{
        {"mean", m.fit.mean},
        {"std", m.fit.std},
        {"sample_count", m.fit.sample_count},
        {"tone_hz", m.tone_hz},
        {"bandwidth_hz", bw},
        {"psd_fraction_below_bandwidth", m.psd ? json(m.psd->fraction_below(bw)) : json(nullptr)},
    };
    auto os = open_output(dir / "pn_fit.json");
    os << fit.dump(2) << '\n';
}

std::vector<KSweepRow> run_sweep_k(const ExperimentConfig& cfg, std::span<const int> k_list)
{
    std::vector<KSweepRow> rows;
    for (int k : k_list) {
        const ExperimentConfig kcfg = with_guard_count(cfg, k);
        rows.push_back({k, run_simulation(kcfg).mean_evm_db()});
    }
    return rows;
}

void write_sweep_k_outputs(std::span<const KSweepRow> rows, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto os = open_output(dir / "ksweep.csv");
    os << "K,mean_evm_db\n";
    for (const auto& r : rows) {
        os << r.k_guard << ',' << (r.mean_evm_db ? num(*r.mean_evm_db) : std::string("nan")) << '\n';
    }
}

StreamResult run_stream(const ExperimentConfig& cfg, std::span<const std::uint8_t> input)
{
    ChannelConfig channel = cfg.channel;
    channel.sample_rate = cfg.phy.ofdm.sample_rate;
    channel.seed = cfg.seed;
    return stream_bytes(input, cfg.phy, channel, cfg.pnc_enabled);
}

} // namespace mmwsim
