#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/catalog.hpp"
#include "chanprobe/conversions.hpp"
#include "chanprobe/link_spec.hpp"

namespace chanprobe {

namespace phys {
inline constexpr double planck = 6.62607015e-34;   // J s
inline constexpr double light_speed = 299792458.0; // m/s
} // namespace phys

/// Bandwidth a 10 Gbit/s OOK channel is taken to occupy when deriving a legacy PSD.
inline constexpr double kOokBandwidthGhz = 20.0;

struct ConstantPsd {
    double mw_per_ghz = 0.0;
    bool operator==(const ConstantPsd&) const = default;
};
struct ConstantPower {
    double dbm = 0.0;
    bool operator==(const ConstantPower&) const = default;
};
using PowerMode = std::variant<ConstantPsd, ConstantPower>;

inline const char* mode_name(const PowerMode& m) { return std::holds_alternative<ConstantPsd>(m) ? "psd" : "power"; }

struct ProbeStimulus {
    PltConfig config;
    PowerMode mode;
};

struct NoiseModel {
    double ber_readout_sigma_db = 0.0; ///< std of the Gaussian perturbation on Q (dB)
    std::uint64_t seed = 0;
};

inline double launch_power(const ProbeStimulus& s)
{
    if (const auto* p = std::get_if<ConstantPower>(&s.mode)) {
        return p->dbm;
    }
    const double psd = std::get<ConstantPsd>(s.mode).mw_per_ghz;
    return mw_to_dbm(psd * s.config.occupied_bandwidth_ghz);
}

/// Legacy network PSD: per-channel power spread over the OOK channel bandwidth.
inline double legacy_psd(double channel_power_dbm, double ook_bandwidth_ghz = kOokBandwidthGhz)
{
    if (!(ook_bandwidth_ghz > 0.0)) {
        throw DomainError("OOK bandwidth must be positive");
    }
    return dbm_to_mw(channel_power_dbm) / ook_bandwidth_ghz;
}

/// Received powers (mW) inside the probed bandwidth after propagation.
struct LinkBudget {
    double signal_mw = 0.0;
    double ase_mw = 0.0;
    double nli_mw = 0.0;
    std::vector<FilterElement> filters; // every passband the signal crossed, DCGs included
};

namespace detail {

/// Incoherent GN-model NLI power (W) generated in one span, in bandwidth `bw_hz`.
inline double span_nli_w(const Span& s, double launch_w, double bw_hz, double center_thz, double dm_factor)
{
    if (s.gamma_per_w_km == 0.0 || launch_w == 0.0) {
        return 0.0;
    }
    const double alpha = s.attenuation_db_per_km / (10.0 * std::log10(std::numbers::e)) / 1e3; // 1/m, power
    const double len = s.length_km * 1e3;
    const double l_eff = -std::expm1(-alpha * len) / alpha;
    const double l_eff_asym = 1.0 / alpha;
    const double gamma = s.gamma_per_w_km / 1e3;
    const double lambda = phys::light_speed / (center_thz * 1e12);
    const double beta2 = s.dispersion_ps_nm_km * 1e-6 * lambda * lambda / (2.0 * std::numbers::pi * phys::light_speed);
    const double beta2_res = std::abs(beta2 * (1.0 - s.compensation_ratio()));

    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double arg = pi2 / 2.0 * beta2_res * l_eff_asym * bw_hz * bw_hz;
    // asinh(x)/x -> 1 as the residual dispersion vanishes.
    const double band_factor = arg < 1e-8 ? std::numbers::pi * bw_hz * bw_hz / 2.0
                                          : std::asinh(arg) / (std::numbers::pi * beta2_res * l_eff_asym);
    const double psd = launch_w / bw_hz;
    double g_nli = 8.0 / 27.0 * gamma * gamma * psd * psd * psd * l_eff * l_eff * band_factor;
    if (s.dispersion_managed()) {
        g_nli *= dm_factor;
    }
    return g_nli * bw_hz;
}

/// x^(2n) for the super-Gaussian exponent.
inline double even_power(double x, int n)
{
    const double x2 = x * x;
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x2;
    return r;
}

inline double center_transmission(const FilterElement& f)
{
    const double x = 2.0 * (-f.center_offset_ghz) / f.bandwidth_3db_ghz;
    return std::exp(-std::numbers::ln2 * even_power(x, f.order));
}

} // namespace detail

/// Propagates a probe of `launch_dbm` occupying `bandwidth_ghz` through the link.
/// With `check_budget`, throws PowerBudgetError when an amplifier output exceeds its limit.
inline LinkBudget propagate(const LinkSpec& link, double launch_dbm, double bandwidth_ghz, bool check_budget = true)
{
    validate(link);
    const double bw_hz = bandwidth_ghz * 1e9;
    const double photon = phys::planck * link.center_frequency_thz * 1e12;

    double sig = dbm_to_mw(launch_dbm) * 1e-3; // W
    double ase = 0.0;
    double nli = 0.0;
    LinkBudget out;
    auto scale = [&](double g) { sig *= g; ase *= g; nli *= g; };

    for (const auto& e : traversal(link)) {
        if (const auto* s = std::get_if<Span>(&e)) {
            nli += detail::span_nli_w(*s, sig, bw_hz, link.center_frequency_thz, link.dm_nli_factor);
            scale(db_to_linear(-s->total_loss_db()));
            if (const auto* g = std::get_if<Dcg>(&s->dcm)) {
                out.filters.push_back(FilterElement{g->bandwidth_3db_ghz, g->order, 0.0});
            }
        } else if (const auto* a = std::get_if<Amplifier>(&e)) {
            const double gain = db_to_linear(a->gain_db);
            scale(gain);
            ase += photon * db_to_linear(a->noise_figure_db) * gain * bw_hz;
            if (check_budget) {
                const double total_dbm = mw_to_dbm((sig + ase + nli) * 1e3);
                if (total_dbm > a->max_total_output_power_dbm) {
                    throw PowerBudgetError(link.name + ": amplifier output " + std::to_string(total_dbm) +
                                           " dBm exceeds " + std::to_string(a->max_total_output_power_dbm) + " dBm");
                }
            }
        } else {
            const auto& f = std::get<FilterElement>(e);
            scale(detail::center_transmission(f));
            out.filters.push_back(f);
        }
    }
    out.signal_mw = sig * 1e3;
    out.ase_mw = ase * 1e3;
    out.nli_mw = nli * 1e3;
    return out;
}

/// Accumulated ASE (mW) at the receiver in `bandwidth_ghz` (12.5 GHz: OSNR reference).
inline double ase_noise_power(const LinkSpec& link, double bandwidth_ghz = kRefBandwidthGhz)
{
    return propagate(link, 0.0, bandwidth_ghz, false).ase_mw;
}

/// GN-model NLI (mW) at the receiver within the probe's occupied bandwidth.
inline double nli_noise_power(const LinkSpec& link, const ProbeStimulus& stimulus)
{
    return propagate(link, launch_power(stimulus), stimulus.config.occupied_bandwidth_ghz, false).nli_mw;
}

/// SNR penalty (dB) of an equalized receiver behind a filter cascade: the spectrally weighted
/// noise enhancement 10 log10( int S/|H|^2 / int S ), S a raised-cosine power spectrum.
inline double filter_penalty(std::span<const FilterElement> filters, const PltConfig& config)
{
    if (filters.empty()) {
        return 0.0;
    }
    const double rs = config.symbol_rate_gbaud;
    const double beta = std::max(0.0, config.roll_off());
    const double half = config.occupied_bandwidth_ghz / 2.0;
    const double flat = rs * (1.0 - beta) / 2.0;

    auto spectrum = [&](double f) {
        const double af = std::abs(f);
        if (af <= flat) return 1.0;
        if (af >= half || beta == 0.0) return 0.0;
        const double c = std::cos(std::numbers::pi / (2.0 * beta * rs) * (af - flat));
        return c * c;
    };
    auto exponent = [&](double f) {
        double e = 0.0;
        for (const auto& h : filters) {
            e += std::numbers::ln2 * detail::even_power(2.0 * (f - h.center_offset_ghz) / h.bandwidth_3db_ghz, h.order);
        }
        return e;
    };

    // Composite Simpson; the enhancement is summed relative to its peak to stay finite.
    constexpr int intervals = 2000;
    const double step = 2.0 * half / intervals;
    std::vector<double> weight(intervals + 1), expo(intervals + 1);
    double peak = 0.0;
    double den = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double f = -half + i * step;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        weight[i] = w * spectrum(f);
        expo[i] = exponent(f);
        den += weight[i];
        if (weight[i] > 0.0) peak = std::max(peak, expo[i]);
    }
    double num = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        num += weight[i] * std::exp(expo[i] - peak);
    }
    return std::max(0.0, 10.0 * std::log10(num / den) + peak * 10.0 / std::numbers::ln10);
}

inline double filter_penalty(const LinkSpec& link, const PltConfig& config)
{
    const auto budget = propagate(link, 0.0, config.occupied_bandwidth_ghz, false);
    return filter_penalty(budget.filters, config);
}

/// Noise-free GSNR (dB) of the probe at the receiver, filtering penalty included.
inline double ground_truth_gsnr(const LinkSpec& link, const ProbeStimulus& stimulus)
{
    const auto budget = propagate(link, launch_power(stimulus), stimulus.config.occupied_bandwidth_ghz);
    const double snr = linear_to_db(budget.signal_mw / (budget.ase_mw + budget.nli_mw));
    return snr - filter_penalty(budget.filters, stimulus.config);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Synthetic receiver BER reading. The noise stream is derived from (seed, call_index) only.
inline double simulate_measurement(const LinkSpec& link, const ProbeStimulus& stimulus, const B2BCurve& curve,
                                   const NoiseModel& noise, std::uint64_t call_index = 0)
{
    if (curve.config_id != stimulus.config.id) {
        throw CatalogError("curve " + curve.config_id + " does not match stimulus " + stimulus.config.id);
    }
    const double gsnr = ground_truth_gsnr(link, stimulus);
    const double gosnr = gosnr_from_gsnr(gsnr, stimulus.config.symbol_rate_gbaud);
    double q = q_from_osnr(curve, gosnr, Extrapolation::Saturate);
    if (noise.ber_readout_sigma_db > 0.0) {
        std::mt19937_64 gen(detail::splitmix64(noise.seed ^ detail::splitmix64(call_index)));
        std::normal_distribution<double> dist(0.0, noise.ber_readout_sigma_db);
        q += dist(gen);
    }
    return ber_from_q(q);
}

} // namespace chanprobe
