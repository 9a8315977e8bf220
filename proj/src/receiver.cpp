#include "mmwsim/receiver.hpp"

#include "mmwsim/fft.hpp"
#include "mmwsim/pnc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmwsim {

namespace {

double to_db(double err_power, double count)
{
    if (count <= 0.0 || err_power <= 0.0) {
        return kEvmFloorDb;
    }
    return std::max(kEvmFloorDb, 10.0 * std::log10(err_power / count));
}

} // namespace

ChannelEstimate estimate_channel_ls(std::span<const SampleBuffer> preamble_bins,
                                    std::span<const Complex> training, const SubcarrierPlan& plan)
{
    const std::size_t n = plan.n_fft;
    if (preamble_bins.empty() || training.size() != n) {
        throw LengthMismatch("estimate_channel_ls: need at least one preamble symbol and n_fft training bins");
    }
    for (const auto& sym : preamble_bins) {
        if (sym.size() != n) {
            throw LengthMismatch("estimate_channel_ls: preamble symbol is not n_fft bins");
        }
    }

    ChannelEstimate est;
    est.bins = plan.occupied_indices();
    est.h_freq.assign(n, Complex{});
    const double reps = static_cast<double>(preamble_bins.size());

    double diff_power = 0.0;
    for (auto b : est.bins) {
        if (std::abs(training[b]) == 0.0) {
            throw std::invalid_argument("estimate_channel_ls: training bin " + std::to_string(b) + " is zero");
        }
        Complex acc{};
        for (const auto& sym : preamble_bins) {
            acc += sym[b] / training[b];
        }
        est.h_freq[b] = acc / reps;
        if (preamble_bins.size() >= 2) {
            diff_power += std::norm(preamble_bins[0][b] - preamble_bins[1][b]);
        }
    }
    // Var(Y1 - Y2) = 2 * noise variance.
    est.noise_floor_est = diff_power / (2.0 * static_cast<double>(est.bins.size()));
    return est;
}

EqualizedSymbol equalize(std::span<const Complex> bins, const ChannelEstimate& est, const SubcarrierPlan& plan)
{
    if (bins.size() != plan.n_fft || est.h_freq.size() != plan.n_fft) {
        throw LengthMismatch("equalize: bins and estimate must have n_fft entries");
    }
    double hmax = 0.0;
    for (auto b : est.bins) {
        hmax = std::max(hmax, std::abs(est.h_freq[b]));
    }
    const double eps = kErasureRatio * hmax;

    EqualizedSymbol out;
    out.points.resize(plan.payload_indices.size());
    out.erased.assign(plan.payload_indices.size(), false);
    for (std::size_t i = 0; i < plan.payload_indices.size(); ++i) {
        const Complex h = est.h_freq[plan.payload_indices[i]];
        if (!(std::abs(h) > eps)) {
            out.erased[i] = true;
            ++out.erased_count;
            continue;
        }
        out.points[i] = bins[plan.payload_indices[i]] / h;
    }
    return out;
}

double combine_evm_db(std::span<const double> per_symbol_evm, std::span<const std::size_t> counts)
{
    if (per_symbol_evm.size() != counts.size()) {
        throw LengthMismatch("combine_evm_db: value and count lists differ in length");
    }
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto c = static_cast<double>(counts[i]);
        err += c * std::pow(10.0, per_symbol_evm[i] / 10.0);
        total += c;
    }
    return to_db(err, total);
}

DecodeReport decode_frame(std::span<const Complex> rx_samples, const ReceiverConfig& cfg, bool pnc_enabled,
                          std::optional<std::span<const std::uint8_t>> true_bits)
{
    const OfdmConfig& ofdm = cfg.ofdm;
    ofdm.validate();
    const std::size_t sym_len = ofdm.symbol_len();
    const std::size_t n_symbols = kPreambleSymbols + cfg.n_payload_symbols;
    if (rx_samples.size() < n_symbols * sym_len) {
        throw InsufficientData("decode_frame: frame too short (" + std::to_string(rx_samples.size())
                               + " samples, need " + std::to_string(n_symbols * sym_len) + ")");
    }

    const auto& plan = ofdm.plan;
    const Modulation m = cfg.modulation;
    const auto bps = static_cast<std::size_t>(bits_per_symbol(m));
    const std::size_t n_payload = plan.payload_indices.size();

    if (true_bits && true_bits->size() < n_payload * bps * cfg.n_payload_symbols) {
        throw LengthMismatch("decode_frame: reference bits shorter than frame capacity");
    }

    DecodeReport report;
    std::vector<SampleBuffer> preamble;
    std::optional<ChannelEstimate> chan;
    std::vector<double> pilot_phase;
    double err_total = 0.0;
    double count_total = 0.0;
    double genie_err = 0.0;
    double genie_count = 0.0;

    for (std::size_t s = 0; s < n_symbols; ++s) {
        const auto sym = rx_samples.subspan(s * sym_len, sym_len);
        SampleBuffer bins;
        if (pnc_enabled) {
            const auto body = sym.subspan(ofdm.cp_len);
            const PhaseEstimate est = estimate_phase(body, ofdm);
            bins = dsp::fft(cancel(body, est));
            if (s >= kPreambleSymbols) {
                report.phase_trajectory.insert(report.phase_trajectory.end(), est.per_sample_phase.begin(),
                                               est.per_sample_phase.end());
            }
        } else {
            bins = demodulate_symbol(sym, ofdm);
        }

        if (s < kPreambleSymbols) {
            preamble.push_back(std::move(bins));
            if (preamble.size() == kPreambleSymbols) {
                chan = estimate_channel_ls(preamble, training_bins(ofdm), plan);
            }
            continue;
        }

        const EqualizedSymbol eq = equalize(bins, *chan, plan);
        report.erased_bins += eq.erased_count;

        const Complex h_pilot = chan->h_freq[plan.pilot_index];
        if (std::abs(h_pilot) > 0.0) {
            pilot_phase.push_back(std::arg(bins[plan.pilot_index] / h_pilot / ofdm.pilot_value));
        }

        const std::size_t payload_index = s - kPreambleSymbols;
        SampleBuffer reference;
        if (true_bits) {
            reference = map_bits(true_bits->subspan(payload_index * n_payload * bps, n_payload * bps), m);
        }

        double err = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_payload; ++i) {
            const std::size_t label = eq.erased[i] ? 0 : nearest_label(eq.points[i], m);
            for (int b = static_cast<int>(bps) - 1; b >= 0; --b) {
                report.bits.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
            }
            if (eq.erased[i]) {
                continue;
            }
            err += std::norm(eq.points[i] - constellation(m)[label]);
            ++count;
            if (true_bits) {
                genie_err += std::norm(eq.points[i] - reference[i]);
                genie_count += 1.0;
            }
        }
        report.points.insert(report.points.end(), eq.points.begin(), eq.points.end());
        report.per_symbol_evm.push_back(to_db(err, static_cast<double>(count)));
        report.per_symbol_points.push_back(count);
        err_total += err;
        count_total += static_cast<double>(count);
    }

    report.evm_db = to_db(err_total, count_total);
    if (true_bits) {
        report.genie_evm_db = to_db(genie_err, genie_count);
    }

    if (pilot_phase.size() >= 2) {
        double mean = 0.0;
        for (double p : pilot_phase) mean += p;
        mean /= static_cast<double>(pilot_phase.size());
        double var = 0.0;
        for (double p : pilot_phase) var += (p - mean) * (p - mean);
        report.residual_phase_std = std::sqrt(var / static_cast<double>(pilot_phase.size()));
    }
    return report;
}

} // namespace mmwsim
