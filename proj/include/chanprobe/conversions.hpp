#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "chanprobe/errors.hpp"

namespace chanprobe {

/// OSNR reference bandwidth (0.1 nm at 1550 nm). Every OSNR/GOSNR value is referenced to it.
inline constexpr double kRefBandwidthGhz = 12.5;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

/// Gaussian Q factor in dB for a pre-FEC bit error ratio: 20 log10(sqrt(2) erfc^-1(2 ber)).
inline double q_from_ber(double ber)
{
    if (!(ber > 0.0 && ber < 0.5)) {
        throw DomainError("BER must lie in (0, 0.5), got " + std::to_string(ber));
    }
    const double q = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * ber);
    return 20.0 * std::log10(q);
}

/// Inverse of q_from_ber. Very large Q underflows to a BER of zero.
inline double ber_from_q(double q_db)
{
    const double q = std::pow(10.0, q_db / 20.0);
    return 0.5 * std::erfc(q / std::numbers::sqrt2);
}

/// Re-references an OSNR-like quantity from the 12.5 GHz reference bandwidth to the symbol rate.
inline double gsnr_from_gosnr(double gosnr_db, double symbol_rate_gbaud)
{
    if (!(symbol_rate_gbaud > 0.0)) {
        throw DomainError("symbol rate must be positive");
    }
    return gosnr_db + 10.0 * std::log10(kRefBandwidthGhz / symbol_rate_gbaud);
}

inline double gosnr_from_gsnr(double gsnr_db, double symbol_rate_gbaud)
{
    if (!(symbol_rate_gbaud > 0.0)) {
        throw DomainError("symbol rate must be positive");
    }
    return gsnr_db + 10.0 * std::log10(symbol_rate_gbaud / kRefBandwidthGhz);
}

} // namespace chanprobe
