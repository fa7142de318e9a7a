#pragma once

#include <cmath>
#include <vector>

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/catalog.hpp"
#include "chanprobe/conversions.hpp"

namespace chanprobe {

/// Simulated back-to-back lab sweep: a noise-loaded transceiver with a finite
/// transmitter SNR, characterized around its FEC-threshold OSNR.
struct BenchModel {
    double tx_snr_db = 25.0;
    double fec_threshold_ber = kDefaultFecThresholdBer;
    double below_threshold_db = 9.0;
    double above_threshold_db = 12.0;
    int points = 43;
};

/// Gray-coded M-QAM BER approximation at an electrical SNR (dB) behind the transmitter noise floor.
inline double bench_ber(Modulation m, double snr_db, const BenchModel& model = {})
{
    const double bits = bits_per_symbol(m);
    const double order = std::pow(2.0, bits);
    const double snr = 1.0 / (1.0 / db_to_linear(snr_db) + 1.0 / db_to_linear(model.tx_snr_db));
    return (2.0 / bits) * (1.0 - 1.0 / std::sqrt(order)) * std::erfc(std::sqrt(3.0 * snr / (2.0 * (order - 1.0))));
}

/// SNR (dB) at which bench_ber crosses the FEC threshold. Bisection; BER falls with SNR.
inline double bench_required_snr(Modulation m, const BenchModel& model = {})
{
    double lo = -20.0;
    double hi = model.tx_snr_db;
    if (bench_ber(m, hi, model) > model.fec_threshold_ber) {
        throw CharacterizationError(std::string(to_string(m)) + ": FEC threshold unreachable below the transmitter SNR");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bench_ber(m, mid, model) > model.fec_threshold_ber ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::vector<B2BSample> bench_samples(const PltConfig& config, const BenchModel& model = {})
{
    const double to_osnr = 10.0 * std::log10(config.symbol_rate_gbaud / kRefBandwidthGhz);
    const double required_osnr = bench_required_snr(config.modulation, model) + to_osnr;
    const double first = required_osnr - model.below_threshold_db;
    const double step = (model.below_threshold_db + model.above_threshold_db) / (model.points - 1);
    std::vector<B2BSample> out;
    out.reserve(static_cast<std::size_t>(model.points));
    for (int i = 0; i < model.points; ++i) {
        const double osnr = first + i * step;
        out.push_back({osnr, q_from_ber(bench_ber(config.modulation, osnr - to_osnr, model))});
    }
    return out;
}

/// Fits a back-to-back curve for every catalog entry.
inline CurveSet characterize(const Catalog& catalog, const BenchModel& model = {})
{
    CurveSet curves;
    for (const auto& c : catalog) {
        curves.emplace(c.id, fit_b2b(bench_samples(c, model), model.fec_threshold_ber, c.id));
    }
    return curves;
}

} // namespace chanprobe
