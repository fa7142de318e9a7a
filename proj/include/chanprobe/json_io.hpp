#pragma once

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/catalog.hpp"
#include "chanprobe/link_spec.hpp"
#include "chanprobe/pipeline.hpp"

namespace chanprobe {

using json = nlohmann::json;

namespace detail {

/// Typed field access that reports failures with a JSON pointer.
class Fields {
public:
    Fields(const json& node, std::string pointer) : node_(node), ptr_(std::move(pointer))
    {
        if (!node_.is_object()) throw SchemaError(ptr_.empty() ? "/" : ptr_, "expected an object");
    }

    const std::string& pointer() const { return ptr_; }
    std::string at(const std::string& key) const { return ptr_ + "/" + key; }
    bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

    const json& node(const std::string& key) const
    {
        if (!node_.contains(key)) throw SchemaError(at(key), "missing required field");
        return node_.at(key);
    }

    double number(const std::string& key) const
    {
        const auto& v = node(key);
        if (!v.is_number()) throw SchemaError(at(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) const
    {
        const auto& v = node(key);
        if (!v.is_number_integer()) throw SchemaError(at(key), "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key) const
    {
        const auto& v = node(key);
        if (!v.is_string()) throw SchemaError(at(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) const
    {
        return has(key) ? string(key) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = node_.at(key);
        if (!v.is_boolean()) throw SchemaError(at(key), "expected a boolean");
        return v.get<bool>();
    }

    const json& array(const std::string& key) const
    {
        const auto& v = node(key);
        if (!v.is_array()) throw SchemaError(at(key), "expected an array");
        return v;
    }

private:
    const json& node_;
    std::string ptr_;
};

/// Re-raises a library error as a schema error at `pointer`.
template <typename F>
auto checked(const std::string& pointer, F&& f)
{
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(pointer, e.what());
    }
}

} // namespace detail

// ---- catalog and curves -------------------------------------------------------------

inline json to_json(const PltConfig& c)
{
    return {{"id", c.id},
            {"line_rate_gbps", c.line_rate_gbps},
            {"modulation", std::string(to_string(c.modulation))},
            {"symbol_rate_gbaud", c.symbol_rate_gbaud},
            {"occupied_bandwidth_ghz", c.occupied_bandwidth_ghz}};
}

inline json to_json(const B2BCurve& k)
{
    return {{"config_id", k.config_id},
            {"coeffs", {k.a, k.b, k.c}},
            {"valid_range", {k.osnr_min_db, k.osnr_max_db}},
            {"fec_threshold_ber", k.fec_threshold_ber},
            {"required_gosnr_db", k.required_gosnr_db}};
}

inline PltConfig config_from_json(const json& j, const std::string& pointer)
{
    detail::Fields f(j, pointer);
    const auto mod_name = f.string("modulation");
    const auto mod = parse_modulation(mod_name);
    if (!mod) throw SchemaError(f.at("modulation"), "unknown modulation '" + mod_name + "'");
    PltConfig c;
    c.id = f.string("id");
    c.line_rate_gbps = f.integer("line_rate_gbps");
    c.modulation = *mod;
    c.symbol_rate_gbaud = f.number("symbol_rate_gbaud");
    c.occupied_bandwidth_ghz = f.number("occupied_bandwidth_ghz", c.symbol_rate_gbaud * (1.0 + kDefaultRollOff));
    detail::checked(pointer, [&] { validate(c); return 0; });
    return c;
}

inline B2BCurve curve_from_json(const json& j, const std::string& pointer)
{
    detail::Fields f(j, pointer);
    B2BCurve k;
    k.config_id = f.string("config_id");
    const auto& coeffs = f.array("coeffs");
    if (coeffs.size() != 3) throw SchemaError(f.at("coeffs"), "expected [a, b, c]");
    for (std::size_t i = 0; i < 3; ++i) {
        if (!coeffs[i].is_number()) throw SchemaError(f.at("coeffs") + "/" + std::to_string(i), "expected a number");
    }
    k.a = coeffs[0].get<double>();
    k.b = coeffs[1].get<double>();
    k.c = coeffs[2].get<double>();
    const auto& range = f.array("valid_range");
    if (range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
        throw SchemaError(f.at("valid_range"), "expected [osnr_min_db, osnr_max_db]");
    }
    k.osnr_min_db = range[0].get<double>();
    k.osnr_max_db = range[1].get<double>();
    k.fec_threshold_ber = f.number("fec_threshold_ber", kDefaultFecThresholdBer);
    detail::checked(pointer, [&] {
        check_monotone(k);
        const double q = k.threshold_q_db();
        k.required_gosnr_db = f.has("required_gosnr_db") ? f.number("required_gosnr_db") : gosnr_from_q(k, q);
        return 0;
    });
    if (k.required_gosnr_db < k.osnr_min_db || k.required_gosnr_db > k.osnr_max_db) {
        throw SchemaError(f.at("required_gosnr_db"), "outside valid_range");
    }
    return k;
}

struct CatalogDocument {
    Catalog configs;
    CurveSet curves;
};

inline json to_json(const Catalog& catalog, const CurveSet& curves)
{
    json configs = json::array();
    for (const auto& c : catalog) configs.push_back(to_json(c));
    json jc = json::array();
    for (const auto& c : catalog) {
        if (auto it = curves.find(c.id); it != curves.end()) jc.push_back(to_json(it->second));
    }
    return {{"configs", configs}, {"curves", jc}};
}

inline CatalogDocument catalog_from_json(const json& j)
{
    detail::Fields f(j, "");
    CatalogDocument doc;
    const auto& configs = f.array("configs");
    for (std::size_t i = 0; i < configs.size(); ++i) {
        doc.configs.push_back(config_from_json(configs[i], "/configs/" + std::to_string(i)));
    }
    detail::checked("/configs", [&] { validate(doc.configs); return 0; });
    if (f.has("curves")) {
        const auto& curves = f.array("curves");
        for (std::size_t i = 0; i < curves.size(); ++i) {
            const std::string ptr = "/curves/" + std::to_string(i);
            auto k = curve_from_json(curves[i], ptr);
            const bool known = std::any_of(doc.configs.begin(), doc.configs.end(),
                                           [&](const PltConfig& c) { return c.id == k.config_id; });
            if (!known) throw SchemaError(ptr + "/config_id", "no configuration '" + k.config_id + "'");
            doc.curves.insert_or_assign(k.config_id, std::move(k));
        }
    }
    return doc;
}

// ---- links ----------------------------------------------------------------------------

inline json to_json(const Element& e)
{
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Span>) {
                json dcm = nullptr;
                if (const auto* d = std::get_if<Dcf>(&x.dcm)) {
                    dcm = {{"type", "dcf"}, {"insertion_loss_db", d->insertion_loss_db},
                           {"compensation_ratio", d->compensation_ratio}};
                } else if (const auto* g = std::get_if<Dcg>(&x.dcm)) {
                    dcm = {{"type", "dcg"}, {"insertion_loss_db", g->insertion_loss_db},
                           {"bandwidth_3db_ghz", g->bandwidth_3db_ghz}, {"order", g->order},
                           {"compensation_ratio", g->compensation_ratio}};
                }
                return {{"type", "span"},
                        {"length_km", x.length_km},
                        {"attenuation_db_per_km", x.attenuation_db_per_km},
                        {"dispersion_ps_nm_km", x.dispersion_ps_nm_km},
                        {"gamma_per_w_km", x.gamma_per_w_km},
                        {"extra_loss_db", x.extra_loss_db},
                        {"dcm", dcm}};
            } else if constexpr (std::is_same_v<T, Amplifier>) {
                return {{"type", "amp"},
                        {"noise_figure_db", x.noise_figure_db},
                        {"gain_db", x.gain_db},
                        {"max_total_output_power_dbm", x.max_total_output_power_dbm}};
            } else {
                return {{"type", "filter"},
                        {"bandwidth_3db_ghz", x.bandwidth_3db_ghz},
                        {"order", x.order},
                        {"center_offset_ghz", x.center_offset_ghz}};
            }
        },
        e);
}

inline json to_json(const LinkSpec& link)
{
    json elements = json::array();
    for (const auto& e : link.elements) elements.push_back(to_json(e));
    json j = {{"name", link.name},
              {"loopback", link.loopback},
              {"center_frequency_thz", link.center_frequency_thz},
              {"dm_nli_factor", link.dm_nli_factor},
              {"elements", elements}};
    j["design_psd_mw_per_ghz"] = link.design_psd_mw_per_ghz ? json(*link.design_psd_mw_per_ghz) : json(nullptr);
    return j;
}

inline Element element_from_json(const json& j, const std::string& pointer)
{
    detail::Fields f(j, pointer);
    const auto type = f.string("type");
    if (type == "span") {
        Span s;
        s.length_km = f.number("length_km");
        s.attenuation_db_per_km = f.number("attenuation_db_per_km", s.attenuation_db_per_km);
        s.dispersion_ps_nm_km = f.number("dispersion_ps_nm_km", s.dispersion_ps_nm_km);
        s.gamma_per_w_km = f.number("gamma_per_w_km", s.gamma_per_w_km);
        s.extra_loss_db = f.number("extra_loss_db", s.extra_loss_db);
        if (f.has("dcm")) {
            detail::Fields d(f.node("dcm"), f.at("dcm"));
            const auto kind = d.string("type");
            if (kind == "dcf") {
                s.dcm = Dcf{d.number("insertion_loss_db"), d.number("compensation_ratio", 1.0)};
            } else if (kind == "dcg") {
                Dcg g;
                g.insertion_loss_db = d.number("insertion_loss_db", g.insertion_loss_db);
                g.bandwidth_3db_ghz = d.number("bandwidth_3db_ghz", g.bandwidth_3db_ghz);
                g.order = d.integer("order", g.order);
                g.compensation_ratio = d.number("compensation_ratio", g.compensation_ratio);
                s.dcm = g;
            } else if (kind != "none") {
                throw SchemaError(d.at("type"), "expected 'dcf', 'dcg' or 'none', got '" + kind + "'");
            }
        }
        return s;
    }
    if (type == "amp") {
        Amplifier a;
        a.noise_figure_db = f.number("noise_figure_db");
        a.gain_db = f.number("gain_db");
        a.max_total_output_power_dbm = f.number("max_total_output_power_dbm", a.max_total_output_power_dbm);
        return a;
    }
    if (type == "filter") {
        FilterElement x;
        x.bandwidth_3db_ghz = f.number("bandwidth_3db_ghz");
        x.order = f.integer("order", x.order);
        x.center_offset_ghz = f.number("center_offset_ghz", x.center_offset_ghz);
        return x;
    }
    throw SchemaError(f.at("type"), "expected 'span', 'amp' or 'filter', got '" + type + "'");
}

/// Parses and validates a link document. Element-level violations point at the element.
inline LinkSpec link_from_json(const json& j)
{
    detail::Fields f(j, "");
    LinkSpec link;
    link.name = f.string("name", "");
    link.loopback = f.boolean("loopback", false);
    link.center_frequency_thz = f.number("center_frequency_thz", link.center_frequency_thz);
    link.dm_nli_factor = f.number("dm_nli_factor", link.dm_nli_factor);
    if (f.has("design_psd_mw_per_ghz")) link.design_psd_mw_per_ghz = f.number("design_psd_mw_per_ghz");
    const auto& elements = f.array("elements");
    for (std::size_t i = 0; i < elements.size(); ++i) {
        link.elements.push_back(element_from_json(elements[i], "/elements/" + std::to_string(i)));
    }
    try {
        validate(link);
    } catch (const LinkError& e) {
        // Messages carry "element <i>" when an element is at fault.
        const std::string what = e.what();
        const std::string marker = ": element ";
        const auto pos = what.find(marker, link.name.size());
        std::string ptr = "/elements";
        if (pos != std::string::npos) {
            ptr += "/" + std::to_string(std::stoul(what.substr(pos + marker.size())));
        }
        throw SchemaError(ptr, what);
    }
    return link;
}

// ---- reports ----------------------------------------------------------------------------

inline json to_json(const PowerMode& mode)
{
    if (const auto* p = std::get_if<ConstantPsd>(&mode)) return {{"type", "psd"}, {"psd_mw_per_ghz", p->mw_per_ghz}};
    return {{"type", "power"}, {"power_dbm", std::get<ConstantPower>(mode).dbm}};
}

namespace detail {
inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json rate_points(const std::vector<RatePoint>& points)
{
    json out = json::array();
    for (const auto& p : points) out.push_back({{"symbol_rate_gbaud", p.symbol_rate_gbaud}, {"gsnr_db", p.gsnr_db}});
    return out;
}
} // namespace detail

inline json to_json(const ProbeMeasurement& m)
{
    json flags = json::array();
    if (m.extrapolated) flags.push_back("extrapolated");
    if (m.failed) flags.push_back("failed");
    return {{"config_id", m.config_id},
            {"symbol_rate_gbaud", m.symbol_rate_gbaud},
            {"mode", m.mode},
            {"repeat", m.repeat},
            {"ber", m.ber},
            {"q_db", detail::optional_number(m.q_db)},
            {"gosnr_db", detail::optional_number(m.gosnr_db)},
            {"gsnr_db", detail::optional_number(m.gsnr_db)},
            {"flags", flags}};
}

inline json to_json(const CapResult& cap)
{
    json medians = json::array();
    for (const auto& [rate, median] : cap.group_medians) {
        medians.push_back({{"symbol_rate_gbaud", rate}, {"median_gsnr_db", median}});
    }
    return {{"cap_gbaud", cap.cap_gbaud},
            {"threshold_db", cap.threshold_db},
            {"group_medians", medians},
            {"penalized_rates", cap.penalized_rates}};
}

inline json to_json(const MarginEntry& e)
{
    return {{"config_id", e.config_id},
            {"line_rate_gbps", e.line_rate_gbps},
            {"modulation", std::string(to_string(e.modulation))},
            {"symbol_rate_gbaud", e.symbol_rate_gbaud},
            {"estimated_gsnr_db", e.estimated_gsnr_db},
            {"required_gsnr_db", e.required_gsnr_db},
            {"extra_system_margin_db", e.extra_system_margin_db},
            {"implementation_margin_db", e.implementation_margin_db},
            {"predicted_pass", e.predicted_pass},
            {"excluded_by_cap", e.excluded_by_cap}};
}

inline json to_json(const VerificationEntry& v)
{
    return {{"config_id", v.config_id},
            {"actual_pass", v.actual_pass},
            {"predicted_pass", v.predicted_pass},
            {"implementation_margin_db", v.implementation_margin_db},
            {"near_threshold", v.near_threshold}};
}

inline json to_json(const RegimeReport& r)
{
    return {{"regime", std::string(to_string(r.verdict.regime))},
            {"suggested_direction", std::string(suggested_direction(r.verdict.regime))},
            {"mean_delta_db", r.verdict.mean_delta_db},
            {"tolerance_db", r.verdict.tolerance_db},
            {"reference_rate_gbaud", r.input.reference_rate_gbaud},
            {"reference_power_dbm", r.input.reference_power_dbm},
            {"psd_sweep", detail::rate_points(r.input.psd_sweep)},
            {"power_sweep", detail::rate_points(r.input.power_sweep)}};
}

inline json to_json(const ProbingReport& r)
{
    json measurements = json::array();
    for (const auto& m : r.measurements) measurements.push_back(to_json(m));
    json margins = json::array();
    for (const auto& e : r.margins) margins.push_back(to_json(e));
    json j = {{"link", r.link_name},
              {"mode", to_json(r.mode)},
              {"measurements", measurements},
              {"cap", to_json(r.cap)},
              {"link_gsnr_db", r.link_gsnr_db},
              {"margins", margins}};
    j["selected_config"] = r.selected_config ? json(*r.selected_config) : json(nullptr);
    if (r.verification) {
        json v = json::array();
        for (const auto& e : *r.verification) v.push_back(to_json(e));
        j["verification"] = v;
    } else {
        j["verification"] = nullptr;
    }
    j["regime"] = r.regime ? to_json(*r.regime) : json(nullptr);
    return j;
}

// ---- CSV extracts -----------------------------------------------------------------------

namespace detail {
inline std::string fmt_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}
} // namespace detail

inline void write_margins_csv(std::ostream& out, const std::vector<MarginEntry>& margins)
{
    out << "config_id,line_rate,modulation,symbol_rate,margin_db,excluded,predicted_pass\n";
    for (const auto& e : margins) {
        out << e.config_id << ',' << e.line_rate_gbps << ',' << to_string(e.modulation) << ','
            << detail::fmt_number(e.symbol_rate_gbaud) << ',' << detail::fmt_number(e.implementation_margin_db) << ','
            << (e.excluded_by_cap ? "true" : "false") << ',' << (e.predicted_pass ? "true" : "false") << '\n';
    }
}

/// Plot data: one row per symbol rate present in both sweeps.
inline void write_regime_csv(std::ostream& out, const RegimeInput& in)
{
    out << "symbol_rate,gsnr_psd,gsnr_power\n";
    for (const auto& p : in.psd_sweep) {
        for (const auto& q : in.power_sweep) {
            if (q.symbol_rate_gbaud == p.symbol_rate_gbaud) {
                out << detail::fmt_number(p.symbol_rate_gbaud) << ',' << detail::fmt_number(p.gsnr_db) << ','
                    << detail::fmt_number(q.gsnr_db) << '\n';
            }
        }
    }
}

} // namespace chanprobe
