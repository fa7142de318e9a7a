#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "chanprobe/catalog.hpp"
#include "chanprobe/conversions.hpp"
#include "chanprobe/errors.hpp"

namespace chanprobe {

/// Typical soft-decision FEC pre-FEC threshold.
inline constexpr double kDefaultFecThresholdBer = 2.0e-2;

struct B2BSample {
    double osnr_db = 0.0;
    double q_db = 0.0;
};

/// Back-to-back Q-over-OSNR characteristic of one configuration:
/// Q_dB(x) = a x^2 + b x + c, x = OSNR in dB over 12.5 GHz.
struct B2BCurve {
    std::string config_id;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double osnr_min_db = 0.0;
    double osnr_max_db = 0.0;
    double fec_threshold_ber = kDefaultFecThresholdBer;
    double required_gosnr_db = 0.0;

    double threshold_q_db() const { return q_from_ber(fec_threshold_ber); }

    bool operator==(const B2BCurve&) const = default;
};

using CurveSet = std::map<std::string, B2BCurve>;

/// What to do with abscissae or ordinates outside the characterized range.
enum class Extrapolation {
    Reject,   ///< throw
    Clamp,    ///< hold the value at the range boundary
    Saturate, ///< tangent continuation below the range, clamped above it (receiver ceiling)
};

namespace detail {

inline double poly(const B2BCurve& k, double x) { return (k.a * x + k.b) * x + k.c; }
inline double slope(const B2BCurve& k, double x) { return 2.0 * k.a * x + k.b; }

} // namespace detail

/// Throws CharacterizationError unless dQ/dx > 0 on the whole valid range.
inline void check_monotone(const B2BCurve& k)
{
    if (!(k.osnr_max_db > k.osnr_min_db)) {
        throw CharacterizationError(k.config_id + ": empty validity range");
    }
    // The derivative is linear, so its extrema sit on the range ends.
    if (!(detail::slope(k, k.osnr_min_db) > 0.0 && detail::slope(k, k.osnr_max_db) > 0.0)) {
        throw CharacterizationError(k.config_id + ": non-monotone characterization");
    }
}

inline double q_from_osnr(const B2BCurve& k, double osnr_db, Extrapolation policy = Extrapolation::Reject)
{
    if (osnr_db >= k.osnr_min_db && osnr_db <= k.osnr_max_db) {
        return detail::poly(k, osnr_db);
    }
    switch (policy) {
    case Extrapolation::Reject:
        throw ExtrapolationError(k.config_id + ": OSNR " + std::to_string(osnr_db) + " dB outside characterized range");
    case Extrapolation::Clamp:
        return detail::poly(k, std::clamp(osnr_db, k.osnr_min_db, k.osnr_max_db));
    case Extrapolation::Saturate:
        if (osnr_db > k.osnr_max_db) {
            return detail::poly(k, k.osnr_max_db);
        }
        return detail::poly(k, k.osnr_min_db) + detail::slope(k, k.osnr_min_db) * (osnr_db - k.osnr_min_db);
    }
    return detail::poly(k, osnr_db);
}

/// The unique root of a x^2 + b x + c = q inside the valid range.
inline double gosnr_from_q(const B2BCurve& k, double q_db, Extrapolation policy = Extrapolation::Reject)
{
    const double lo = k.osnr_min_db;
    const double hi = k.osnr_max_db;
    const double q_lo = detail::poly(k, lo);
    const double q_hi = detail::poly(k, hi);

    if (q_db < q_lo || q_db > q_hi) {
        if (policy == Extrapolation::Reject || std::isnan(q_db)) {
            throw InversionError(k.config_id + ": Q " + std::to_string(q_db) + " dB outside curve image");
        }
        if (q_db > q_hi) {
            return hi;
        }
        if (policy == Extrapolation::Clamp) {
            return lo;
        }
        return lo + (q_db - q_lo) / detail::slope(k, lo);
    }
    if (q_db == q_lo) {
        return lo;
    }
    if (q_db == q_hi) {
        return hi;
    }

    double x;
    if (std::abs(k.a) < 1e-12) {
        x = (q_db - k.c) / k.b;
    } else {
        const double disc = std::max(0.0, k.b * k.b - 4.0 * k.a * (k.c - q_db));
        const double t = -0.5 * (k.b + std::copysign(std::sqrt(disc), k.b));
        if (t == 0.0) {
            x = -k.b / (2.0 * k.a);
        } else {
            const double r1 = t / k.a;
            const double r2 = (k.c - q_db) / t;
            auto dist = [&](double r) { return r < lo ? lo - r : (r > hi ? r - hi : 0.0); };
            x = dist(r1) <= dist(r2) ? r1 : r2;
        }
    }
    return std::clamp(x, lo, hi);
}

/// Least-squares quadratic fit of a back-to-back sweep; solves the FEC-threshold crossing.
inline B2BCurve fit_b2b(std::span<const B2BSample> samples, double fec_threshold_ber = kDefaultFecThresholdBer,
                        std::string config_id = {})
{
    std::set<double> abscissae;
    for (const auto& s : samples) {
        abscissae.insert(s.osnr_db);
    }
    if (abscissae.size() < 3) {
        throw FitError(config_id + ": insufficient samples (need 3 distinct OSNR values, got " +
                       std::to_string(abscissae.size()) + ")");
    }

    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = samples[static_cast<std::size_t>(i)].osnr_db;
        design(i, 0) = x * x;
        design(i, 1) = x;
        design(i, 2) = 1.0;
        rhs(i) = samples[static_cast<std::size_t>(i)].q_db;
    }
    const Eigen::Vector3d coeffs = design.colPivHouseholderQr().solve(rhs);

    B2BCurve k;
    k.config_id = std::move(config_id);
    k.a = coeffs(0);
    k.b = coeffs(1);
    k.c = coeffs(2);
    k.osnr_min_db = *abscissae.begin();
    k.osnr_max_db = *abscissae.rbegin();
    k.fec_threshold_ber = fec_threshold_ber;
    check_monotone(k);

    const double q_threshold = q_from_ber(fec_threshold_ber);
    if (q_threshold < detail::poly(k, k.osnr_min_db) || q_threshold > detail::poly(k, k.osnr_max_db)) {
        throw CharacterizationError(k.config_id + ": FEC threshold Q outside characterized range");
    }
    k.required_gosnr_db = gosnr_from_q(k, q_threshold);
    return k;
}

/// GSNR the configuration needs to operate at its FEC threshold.
inline double required_gsnr(const B2BCurve& curve, const PltConfig& config)
{
    if (curve.config_id != config.id) {
        throw CatalogError("curve " + curve.config_id + " does not belong to configuration " + config.id);
    }
    return gsnr_from_gosnr(curve.required_gosnr_db, config.symbol_rate_gbaud);
}

inline const B2BCurve& curve_for(const CurveSet& curves, const PltConfig& config)
{
    auto it = curves.find(config.id);
    if (it == curves.end()) {
        throw CatalogError("no back-to-back curve for configuration " + config.id);
    }
    return it->second;
}

} // namespace chanprobe
