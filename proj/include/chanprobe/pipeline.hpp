#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chanprobe/probing.hpp"
#include "chanprobe/regime.hpp"

namespace chanprobe {

struct ProbingOptions {
    std::string link_name;
    PowerMode mode = ConstantPsd{};
    int repeats = 1;
    double threshold_db = kDefaultCapThresholdDb;
    CapBaseline baseline = CapBaseline::RunningMean;
    Averaging averaging = Averaging::Mean;
    double extra_system_margin_db = 0.0;
    bool verify = false;
    /// Reference launch power for the regime test; absent skips it.
    std::optional<double> regime_reference_dbm;
    double regime_tolerance_db = kDefaultRegimeToleranceDb;
};

struct RegimeReport {
    RegimeInput input;
    RegimeVerdict verdict;
};

struct ProbingReport {
    std::string link_name;
    PowerMode mode;
    std::vector<ProbeMeasurement> measurements;
    CapResult cap;
    double link_gsnr_db = 0.0;
    std::vector<MarginEntry> margins;
    std::optional<std::string> selected_config;
    std::optional<std::vector<VerificationEntry>> verification;
    std::optional<RegimeReport> regime;
};

/// Sweep, cap, average, margins, selection, then optional verification and regime test.
inline ProbingReport run_probing(MeasurementSource& source, const Catalog& catalog, const CurveSet& curves,
                                 const ProbingOptions& options)
{
    ProbingReport r;
    r.link_name = options.link_name;
    r.mode = options.mode;
    r.measurements = run_sweep(source, catalog, curves, options.mode, options.repeats);
    r.cap = detect_cap(r.measurements, options.threshold_db, options.baseline);
    r.link_gsnr_db = estimate_link_gsnr(r.measurements, r.cap, options.averaging);
    r.margins = compute_margins(r.link_gsnr_db, catalog, curves, r.cap, options.extra_system_margin_db);
    r.selected_config = select_best(r.margins);
    if (options.verify) {
        r.verification = verify(source, catalog, curves, r.margins, options.mode);
    }
    if (options.regime_reference_dbm) {
        RegimeReport rr;
        rr.input = build_regime_input(source, catalog, curves, *options.regime_reference_dbm, options.repeats);
        rr.verdict = classify(rr.input, options.regime_tolerance_db);
        r.regime = std::move(rr);
    }
    return r;
}

} // namespace chanprobe
