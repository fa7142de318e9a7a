#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "chanprobe/link_model.hpp"
#include "chanprobe/link_spec.hpp"

namespace chanprobe {

/// Design PSD of the long-haul flex-grid fixtures (-1 dBm for a 69.4 GBd probe).
inline constexpr double kLongHaulDesignPsd = 0.0104;
/// Per-channel launch power of the legacy 10G OOK plan on the regional fixtures.
inline constexpr double kLegacyChannelPowerDbm = -10.0;

enum class Compensation { None, DcfOnly, DcfDcgMix };

namespace detail {

inline LinkSpec long_haul(std::string name, double looped_km, int looped_spans)
{
    LinkSpec link;
    link.name = std::move(name);
    link.loopback = true;
    link.design_psd_mw_per_ghz = kLongHaulDesignPsd;
    const double len = looped_km / looped_spans;
    for (int i = 0; i < looped_spans / 2; ++i) {
        Span s;
        s.length_km = len;
        link.elements.emplace_back(s);
        link.elements.emplace_back(Amplifier{5.0, s.total_loss_db(), 23.0});
    }
    return link;
}

/// Regional legacy link: 80 GHz mux/demux at the ends, a two-pass ROADM after the
/// first span on compensated links, spans padded to the amplifiers' 16 dB minimum gain.
inline LinkSpec regional(std::string name, double looped_km, int looped_spans, Compensation comp, int dcg_spans = 0)
{
    LinkSpec link;
    link.name = std::move(name);
    link.loopback = true;
    link.design_psd_mw_per_ghz = legacy_psd(kLegacyChannelPowerDbm);
    const double len = looped_km / looped_spans;
    const FilterElement channel_filter{80.0, 3, 0.0};

    link.elements.emplace_back(channel_filter);
    const int half = looped_spans / 2;
    for (int i = 0; i < half; ++i) {
        Span s;
        s.length_km = len;
        s.attenuation_db_per_km = 0.22;
        s.extra_loss_db = std::max(1.0, 16.0 - s.attenuation_db_per_km * len);
        if (comp == Compensation::DcfDcgMix && i < dcg_spans) {
            s.dcm = Dcg{3.0, 60.0, 3, 0.95};
        } else if (comp != Compensation::None) {
            s.dcm = Dcf{1.0 + 0.07 * len, 0.95};
        }
        link.elements.emplace_back(s);
        link.elements.emplace_back(Amplifier{5.5, s.total_loss_db(), 23.0});
        if (i == 0 && comp != Compensation::None) {
            link.elements.emplace_back(channel_filter);
            link.elements.emplace_back(channel_filter);
        }
    }
    link.elements.emplace_back(channel_filter);
    return link;
}

} // namespace detail

/// Looped test links: five DCM-free long-haul links and eight regional legacy links.
inline std::vector<LinkSpec> fixtures()
{
    using detail::long_haul;
    using detail::regional;
    return {
        long_haul("LH_SAL", 1016, 14),
        long_haul("LH_KRUIO", 1792, 24),
        long_haul("LH_WAR", 2943, 36),
        long_haul("LH_POZ", 3751, 48),
        long_haul("LH_FRA", 5738, 74),
        regional("R_SOL", 3, 2, Compensation::None),
        regional("R_TM", 70, 4, Compensation::DcfOnly),
        regional("R_RAP", 144, 4, Compensation::DcfOnly),
        regional("R_PAI", 241, 6, Compensation::DcfOnly),
        regional("R_VIL", 382, 8, Compensation::DcfOnly),
        regional("R_TSIR", 675, 12, Compensation::DcfOnly),
        regional("R_PYS", 485, 8, Compensation::DcfDcgMix, 2),
        regional("R_ILM", 822, 12, Compensation::DcfDcgMix, 3),
    };
}

inline LinkSpec fixture(const std::string& name)
{
    for (auto& f : fixtures()) {
        if (f.name == name) return f;
    }
    throw LinkError("unknown fixture " + name);
}

inline bool has_dcg(const LinkSpec& link)
{
    return std::any_of(link.elements.begin(), link.elements.end(), [](const Element& e) {
        const auto* s = std::get_if<Span>(&e);
        return s && std::holds_alternative<Dcg>(s->dcm);
    });
}

inline bool dcf_only(const LinkSpec& link)
{
    bool any = false;
    for (const auto& e : link.elements) {
        if (const auto* s = std::get_if<Span>(&e)) {
            if (std::holds_alternative<Dcg>(s->dcm)) return false;
            any = any || std::holds_alternative<Dcf>(s->dcm);
        }
    }
    return any;
}

} // namespace chanprobe
