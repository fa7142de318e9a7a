#pragma once

#include <cmath>
#include <map>
#include <string_view>
#include <vector>

#include "chanprobe/probing.hpp"

namespace chanprobe {

struct RatePoint {
    double symbol_rate_gbaud = 0.0;
    double gsnr_db = 0.0;
};

/// Constant-PSD and constant-power sweeps anchored at the equalization configuration.
struct RegimeInput {
    std::vector<RatePoint> psd_sweep;
    std::vector<RatePoint> power_sweep;
    double reference_rate_gbaud = 0.0;
    double reference_power_dbm = 0.0;
};

enum class Regime { Nonlinear, NearOptimum, Linear };

inline std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Nonlinear: return "nonlinear";
    case Regime::NearOptimum: return "near-optimum";
    case Regime::Linear: return "linear";
    }
    return "?";
}

/// Which way the launch power should move.
inline std::string_view suggested_direction(Regime r)
{
    switch (r) {
    case Regime::Nonlinear: return "decrease";
    case Regime::NearOptimum: return "hold";
    case Regime::Linear: return "increase";
    }
    return "?";
}

struct RegimeVerdict {
    Regime regime = Regime::NearOptimum;
    double mean_delta_db = 0.0; // mean of (psd - power) over rates below the reference
    double tolerance_db = 0.0;
};

inline constexpr double kDefaultRegimeToleranceDb = 0.2;

namespace detail {

/// Mean GSNR per symbol rate over the working probes.
inline std::vector<RatePoint> per_rate_mean(const std::vector<ProbeMeasurement>& sweep)
{
    std::map<double, std::vector<double>> groups;
    for (const auto& m : sweep) {
        if (!m.failed) groups[m.symbol_rate_gbaud].push_back(*m.gsnr_db);
    }
    std::vector<RatePoint> out;
    for (const auto& [rate, values] : groups) {
        out.push_back({rate, mean(values)});
    }
    return out;
}

} // namespace detail

/// Runs both sweeps. The PSD sweep uses the reference power spread over the equalization
/// configuration's occupied bandwidth, so no probe ever exceeds the reference power.
inline RegimeInput build_regime_input(MeasurementSource& source, const Catalog& catalog, const CurveSet& curves,
                                      double reference_power_dbm, int repeats = 1)
{
    const auto& reference = equalization_config(catalog);
    const ConstantPsd psd{dbm_to_mw(reference_power_dbm) / reference.occupied_bandwidth_ghz};
    const ConstantPower power{reference_power_dbm};

    RegimeInput in;
    in.reference_rate_gbaud = reference.symbol_rate_gbaud;
    in.reference_power_dbm = reference_power_dbm;
    in.psd_sweep = detail::per_rate_mean(run_sweep(source, catalog, curves, psd, repeats));
    in.power_sweep = detail::per_rate_mean(run_sweep(source, catalog, curves, power, repeats));
    return in;
}

inline RegimeVerdict classify(const RegimeInput& in, double tolerance_db = kDefaultRegimeToleranceDb)
{
    std::map<double, double> power;
    for (const auto& p : in.power_sweep) power[p.symbol_rate_gbaud] = p.gsnr_db;

    double sum = 0.0;
    int count = 0;
    for (const auto& p : in.psd_sweep) {
        if (p.symbol_rate_gbaud >= in.reference_rate_gbaud) continue;
        auto it = power.find(p.symbol_rate_gbaud);
        if (it == power.end()) continue;
        sum += p.gsnr_db - it->second;
        ++count;
    }
    if (count == 0) {
        throw RegimeError("no symbol rate below the reference rate in both sweeps");
    }
    RegimeVerdict v;
    v.tolerance_db = tolerance_db;
    v.mean_delta_db = sum / count;
    if (v.mean_delta_db > tolerance_db) {
        v.regime = Regime::Nonlinear;
    } else if (v.mean_delta_db < -tolerance_db) {
        v.regime = Regime::Linear;
    } else {
        v.regime = Regime::NearOptimum;
    }
    return v;
}

} // namespace chanprobe
