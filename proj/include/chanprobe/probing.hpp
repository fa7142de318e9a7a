#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/catalog.hpp"
#include "chanprobe/conversions.hpp"
#include "chanprobe/link_model.hpp"
#include "chanprobe/measurement.hpp"

namespace chanprobe {

/// One probing observation and what was derived from it.
struct ProbeMeasurement {
    std::string config_id;
    double symbol_rate_gbaud = 0.0;
    std::string mode; // "psd" | "power"
    int repeat = 0;
    double ber = 0.0;
    std::optional<double> q_db;
    std::optional<double> gosnr_db;
    std::optional<double> gsnr_db; // absent iff failed
    bool extrapolated = false;
    bool failed = false;
};

struct CapResult {
    double cap_gbaud = 0.0;
    std::map<double, double> group_medians; // symbol rate -> median GSNR; all-failed groups absent
    std::vector<double> penalized_rates;
    double threshold_db = 0.0;

    bool penalized(double rate) const
    {
        return std::find(penalized_rates.begin(), penalized_rates.end(), rate) != penalized_rates.end();
    }
};

struct MarginEntry {
    std::string config_id;
    int line_rate_gbps = 0;
    Modulation modulation = Modulation::QPSK;
    double symbol_rate_gbaud = 0.0;
    double estimated_gsnr_db = 0.0;
    double required_gsnr_db = 0.0;
    double extra_system_margin_db = 0.0;
    double implementation_margin_db = 0.0;
    bool predicted_pass = false;
    bool excluded_by_cap = false;
};

struct VerificationEntry {
    std::string config_id;
    bool actual_pass = false;
    bool predicted_pass = false;
    double implementation_margin_db = 0.0;
    bool near_threshold = false;
};

inline constexpr double kDefaultCapThresholdDb = 2.0;
inline constexpr double kNearThresholdDb = 0.2;

/// Reference for "severe penalty" when ascending through symbol-rate groups.
enum class CapBaseline { RunningMean, LowestGroup };
enum class Averaging { Mean, Median };

namespace detail {

inline double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace detail

/// Highest symbol rate first, then highest line rate, then smallest id.
inline const PltConfig& equalization_config(const Catalog& catalog)
{
    if (catalog.empty()) {
        throw CatalogError("empty catalog");
    }
    return *std::min_element(catalog.begin(), catalog.end(), [](const PltConfig& x, const PltConfig& y) {
        if (x.symbol_rate_gbaud != y.symbol_rate_gbaud) return x.symbol_rate_gbaud > y.symbol_rate_gbaud;
        if (x.line_rate_gbps != y.line_rate_gbps) return x.line_rate_gbps > y.line_rate_gbps;
        return x.id < y.id;
    });
}

/// Turns a raw BER reading into Q, GOSNR and GSNR. Readings below the characterized
/// curve are failures; readings above it are clamped and flagged.
inline ProbeMeasurement derive_measurement(const PltConfig& config, const B2BCurve& curve, const PowerMode& mode,
                                           double ber, int repeat = 0)
{
    ProbeMeasurement m;
    m.config_id = config.id;
    m.symbol_rate_gbaud = config.symbol_rate_gbaud;
    m.mode = mode_name(mode);
    m.repeat = repeat;
    m.ber = ber;
    if (!(ber > 0.0 && ber < 0.5)) {
        m.failed = true;
        return m;
    }
    m.q_db = q_from_ber(ber);
    if (*m.q_db < q_from_osnr(curve, curve.osnr_min_db)) {
        m.failed = true;
        return m;
    }
    m.extrapolated = *m.q_db > q_from_osnr(curve, curve.osnr_max_db);
    m.gosnr_db = gosnr_from_q(curve, *m.q_db, Extrapolation::Clamp);
    m.gsnr_db = gsnr_from_gosnr(*m.gosnr_db, config.symbol_rate_gbaud);
    return m;
}

/// Probes every configuration `repeats` times, in catalog order then repeat order.
inline std::vector<ProbeMeasurement> run_sweep(MeasurementSource& source, const Catalog& catalog,
                                               const CurveSet& curves, const PowerMode& mode, int repeats = 1)
{
    if (repeats < 1) {
        throw EngineError("repeats must be >= 1");
    }
    for (const auto& c : catalog) {
        curve_for(curves, c);
    }
    std::vector<ProbeMeasurement> out;
    out.reserve(catalog.size() * static_cast<std::size_t>(repeats));
    for (const auto& config : catalog) {
        const auto& curve = curves.at(config.id);
        const ProbeStimulus stimulus{config, mode};
        for (int r = 0; r < repeats; ++r) {
            double ber;
            try {
                ber = source.measure(stimulus);
            } catch (const SourceError& e) {
                throw SourceError(config.id + " (" + mode_name(mode) + " mode, repeat " + std::to_string(r) +
                                  "): " + e.what());
            }
            out.push_back(derive_measurement(config, curve, mode, ber, r));
        }
    }
    return out;
}

/// Finds the highest symbol rate whose estimates do not collapse relative to the
/// narrower probes. Penalization is sticky: once a rate is penalized, so is every higher one.
inline CapResult detect_cap(const std::vector<ProbeMeasurement>& measurements,
                            double threshold_db = kDefaultCapThresholdDb,
                            CapBaseline baseline = CapBaseline::RunningMean)
{
    if (measurements.empty()) {
        throw EngineError("no measurements");
    }
    std::map<double, std::vector<double>> groups;
    for (const auto& m : measurements) {
        auto& g = groups[m.symbol_rate_gbaud];
        if (!m.failed) g.push_back(*m.gsnr_db);
    }
    if (groups.begin()->second.empty()) {
        throw EngineError("every probe at the lowest symbol rate failed");
    }

    CapResult cap;
    cap.threshold_db = threshold_db;
    std::vector<double> accepted;
    bool penalizing = false;
    for (const auto& [rate, values] : groups) {
        if (!values.empty()) {
            cap.group_medians[rate] = detail::median(values);
        }
        if (!penalizing) {
            if (values.empty()) {
                penalizing = true;
            } else if (!accepted.empty()) {
                const double ref = baseline == CapBaseline::RunningMean ? detail::mean(accepted) : accepted.front();
                penalizing = cap.group_medians[rate] < ref - threshold_db;
            }
        }
        if (penalizing) {
            cap.penalized_rates.push_back(rate);
        } else {
            accepted.push_back(cap.group_medians[rate]);
            cap.cap_gbaud = rate;
        }
    }
    return cap;
}

/// Link GSNR from every working, unpenalized probe.
inline double estimate_link_gsnr(const std::vector<ProbeMeasurement>& measurements, const CapResult& cap,
                                 Averaging averaging = Averaging::Mean)
{
    std::vector<double> values;
    for (const auto& m : measurements) {
        if (!m.failed && !cap.penalized(m.symbol_rate_gbaud)) values.push_back(*m.gsnr_db);
    }
    if (values.empty()) {
        throw EngineError("no accepted measurement to average");
    }
    return averaging == Averaging::Mean ? detail::mean(values) : detail::median(values);
}

inline std::vector<MarginEntry> compute_margins(double link_gsnr_db, const Catalog& catalog, const CurveSet& curves,
                                                const CapResult& cap, double extra_system_margin_db = 0.0)
{
    std::vector<MarginEntry> out;
    out.reserve(catalog.size());
    for (const auto& c : catalog) {
        MarginEntry e;
        e.config_id = c.id;
        e.line_rate_gbps = c.line_rate_gbps;
        e.modulation = c.modulation;
        e.symbol_rate_gbaud = c.symbol_rate_gbaud;
        e.estimated_gsnr_db = link_gsnr_db;
        e.required_gsnr_db = required_gsnr(curve_for(curves, c), c);
        e.extra_system_margin_db = extra_system_margin_db;
        e.implementation_margin_db = link_gsnr_db - e.required_gsnr_db - extra_system_margin_db;
        e.excluded_by_cap = c.symbol_rate_gbaud > cap.cap_gbaud;
        e.predicted_pass = e.implementation_margin_db > 0.0 && !e.excluded_by_cap;
        out.push_back(std::move(e));
    }
    return out;
}

/// Highest line rate among predicted passes; ties go to the larger margin, then the lower symbol rate.
inline std::optional<std::string> select_best(const std::vector<MarginEntry>& margins)
{
    const MarginEntry* best = nullptr;
    for (const auto& e : margins) {
        if (!e.predicted_pass) continue;
        if (!best || e.line_rate_gbps > best->line_rate_gbps ||
            (e.line_rate_gbps == best->line_rate_gbps &&
             (e.implementation_margin_db > best->implementation_margin_db ||
              (e.implementation_margin_db == best->implementation_margin_db &&
               e.symbol_rate_gbaud < best->symbol_rate_gbaud)))) {
            best = &e;
        }
    }
    if (!best) return std::nullopt;
    return best->config_id;
}

/// Re-measures every configuration inside the cap once and checks it against its FEC threshold.
inline std::vector<VerificationEntry> verify(MeasurementSource& source, const Catalog& catalog,
                                             const CurveSet& curves, const std::vector<MarginEntry>& margins,
                                             const PowerMode& mode, double near_threshold_db = kNearThresholdDb)
{
    std::vector<VerificationEntry> out;
    for (const auto& e : margins) {
        if (e.excluded_by_cap) continue;
        const auto& config = find_config(catalog, e.config_id);
        const auto& curve = curve_for(curves, config);
        double ber;
        try {
            ber = source.measure({config, mode});
        } catch (const SourceError& err) {
            throw SourceError(config.id + " (" + mode_name(mode) + " mode, verification): " + err.what());
        }
        VerificationEntry v;
        v.config_id = e.config_id;
        v.predicted_pass = e.predicted_pass;
        v.implementation_margin_db = e.implementation_margin_db;
        v.near_threshold = std::abs(e.implementation_margin_db) < near_threshold_db;
        if (ber <= 0.0) {
            v.actual_pass = true;
        } else if (ber >= 0.5) {
            v.actual_pass = false;
        } else {
            v.actual_pass = q_from_ber(ber) >= curve.threshold_q_db();
        }
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace chanprobe
