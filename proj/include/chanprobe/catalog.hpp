#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chanprobe/errors.hpp"

namespace chanprobe {

enum class Modulation { QPSK, QAM8, QAM16, QAM32, QAM64 };

inline int bits_per_symbol(Modulation m)
{
    switch (m) {
    case Modulation::QPSK: return 2;
    case Modulation::QAM8: return 3;
    case Modulation::QAM16: return 4;
    case Modulation::QAM32: return 5;
    case Modulation::QAM64: return 6;
    }
    return 0;
}

inline std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM8: return "8QAM";
    case Modulation::QAM16: return "16QAM";
    case Modulation::QAM32: return "32QAM";
    case Modulation::QAM64: return "64QAM";
    }
    return "?";
}

inline std::optional<Modulation> parse_modulation(std::string_view s)
{
    if (s.starts_with("DP-")) {
        s.remove_prefix(3);
    }
    for (auto m : {Modulation::QPSK, Modulation::QAM8, Modulation::QAM16, Modulation::QAM32, Modulation::QAM64}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

/// Default spectral occupancy relative to the symbol rate (10% roll-off).
inline constexpr double kDefaultRollOff = 0.1;

/// One probe / transceiver configuration.
struct PltConfig {
    std::string id;
    int line_rate_gbps = 0;
    Modulation modulation = Modulation::QPSK;
    double symbol_rate_gbaud = 0.0;
    double occupied_bandwidth_ghz = 0.0;

    double roll_off() const { return occupied_bandwidth_ghz / symbol_rate_gbaud - 1.0; }

    bool operator==(const PltConfig&) const = default;
};

inline void validate(const PltConfig& c)
{
    if (c.id.empty()) {
        throw CatalogError("configuration id must not be empty");
    }
    if (!(c.symbol_rate_gbaud > 0.0)) {
        throw CatalogError(c.id + ": symbol rate must be positive");
    }
    if (!(c.occupied_bandwidth_ghz >= c.symbol_rate_gbaud)) {
        throw CatalogError(c.id + ": occupied bandwidth below symbol rate");
    }
    // Dual polarization upper bound before FEC overhead.
    if (c.line_rate_gbps <= 0 || c.line_rate_gbps > 2.0 * bits_per_symbol(c.modulation) * c.symbol_rate_gbaud) {
        throw CatalogError(c.id + ": line rate not achievable with this modulation and symbol rate");
    }
}

inline std::string default_config_id(int line_rate_gbps, Modulation m, double symbol_rate_gbaud)
{
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.1f", symbol_rate_gbaud);
    return std::to_string(line_rate_gbps) + "G-DP-" + std::string(to_string(m)) + "-" + rate;
}

inline PltConfig make_config(int line_rate_gbps, Modulation m, double symbol_rate_gbaud,
                             double roll_off = kDefaultRollOff, std::string id = {})
{
    PltConfig c;
    c.id = id.empty() ? default_config_id(line_rate_gbps, m, symbol_rate_gbaud) : std::move(id);
    c.line_rate_gbps = line_rate_gbps;
    c.modulation = m;
    c.symbol_rate_gbaud = symbol_rate_gbaud;
    c.occupied_bandwidth_ghz = symbol_rate_gbaud * (1.0 + roll_off);
    validate(c);
    return c;
}

using Catalog = std::vector<PltConfig>;

/// Validates every entry and id uniqueness.
inline void validate(const Catalog& catalog)
{
    std::set<std::string> ids;
    for (const auto& c : catalog) {
        validate(c);
        if (!ids.insert(c.id).second) {
            throw CatalogError("duplicate configuration id " + c.id);
        }
    }
}

/// The eleven probe configurations used for extended probing.
inline Catalog default_catalog()
{
    using M = Modulation;
    return {
        make_config(100, M::QPSK, 31.5),
        make_config(200, M::QAM16, 34.7),
        make_config(300, M::QAM64, 34.7),
        make_config(300, M::QAM32, 41.7),
        make_config(200, M::QAM8, 46.3),
        make_config(400, M::QAM64, 46.3),
        make_config(300, M::QAM16, 52.1),
        make_config(400, M::QAM32, 55.6),
        make_config(200, M::QPSK, 69.4),
        make_config(300, M::QAM8, 69.4),
        make_config(400, M::QAM16, 69.4),
    };
}

inline const PltConfig& find_config(const Catalog& catalog, std::string_view id)
{
    auto it = std::find_if(catalog.begin(), catalog.end(), [&](const PltConfig& c) { return c.id == id; });
    if (it == catalog.end()) {
        throw CatalogError("unknown configuration " + std::string(id));
    }
    return *it;
}

} // namespace chanprobe
