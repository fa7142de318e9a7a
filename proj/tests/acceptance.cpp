// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "chanprobe.hpp"
#include "oracles.hpp"

using namespace chanprobe;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail)
{
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const Catalog& catalog()
{
    static const auto cat = default_catalog();
    return cat;
}

const CurveSet& curves()
{
    static const auto k = characterize(catalog());
    return k;
}

PowerMode design_mode(const LinkSpec& link) { return ConstantPsd{*link.design_psd_mw_per_ghz}; }

void averaging_accuracy()
{
    const auto start = std::chrono::steady_clock::now();
    const auto link = fixture("LH_WAR");
    const auto mode = design_mode(link);
    const double truth = ground_truth_gsnr(link, {find_config(catalog(), "200G-DP-16QAM-34.7"), mode});
    const int trials = 500;
    int within = 0;
    double sum_abs = 0.0;
    for (int t = 0; t < trials; ++t) {
        SimulatedSource src(link, curves(), {0.3, static_cast<std::uint64_t>(t)});
        const auto m = run_sweep(src, catalog(), curves(), mode, 10);
        const double err = std::abs(estimate_link_gsnr(m, detect_cap(m)) - truth);
        within += err <= 0.1;
        sum_abs += err;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double frac = static_cast<double>(within) / trials;
    const double mae = sum_abs / trials;
    report(1, "averaging accuracy", frac >= 0.95 && mae <= 0.05 && secs < 10.0,
           fmt("LH_WAR, sigma 0.3 dB, 10 repeats: %.1f%% of %d trials within 0.1 dB, mean |error| %.4f dB, %.2f s",
               100.0 * frac, trials, mae, secs));
}

/// Regional DCF link with a ROADM-style cascade of 80 GHz channel filters; optionally
/// the first `dcg_spans` spans use 60 GHz grating compensators instead of fibre.
LinkSpec filtered_link(int dcg_spans)
{
    LinkSpec link;
    link.name = "cascade";
    link.design_psd_mw_per_ghz = legacy_psd(kLegacyChannelPowerDbm);
    const FilterElement channel{80.0, 3, 0.0};
    for (int i = 0; i < 6; ++i) {
        Span s;
        s.length_km = 60.0;
        s.attenuation_db_per_km = 0.22;
        s.extra_loss_db = 2.8;
        if (i < dcg_spans) {
            s.dcm = Dcg{3.0, 60.0, 3, 0.95};
        } else {
            s.dcm = Dcf{1.0 + 0.07 * s.length_km, 0.95};
        }
        link.elements.emplace_back(s);
        link.elements.emplace_back(Amplifier{5.5, s.total_loss_db(), 23.0});
        link.elements.emplace_back(channel);
        link.elements.emplace_back(channel);
    }
    return link;
}

void cap_detection()
{
    const auto& c69 = find_config(catalog(), "400G-DP-16QAM-69.4");
    const auto& c55 = find_config(catalog(), "400G-DP-32QAM-55.6");
    auto cap_of = [](const LinkSpec& link) {
        SimulatedSource src(link, curves(), {});
        const auto m = run_sweep(src, catalog(), curves(), design_mode(link));
        return detect_cap(m).cap_gbaud;
    };
    const auto plain = filtered_link(0);
    const auto dcg = filtered_link(6);
    const double p69 = filter_penalty(plain, c69);
    const double p55 = filter_penalty(plain, c55);
    const double p55_dcg = filter_penalty(dcg, c55);
    const double cap_plain = cap_of(plain);
    const double cap_dcg = cap_of(dcg);
    const bool sized = p69 > 5.0 && p55 < 1.1 && p55_dcg > 2.5;
    report(2, "cap detection", sized && cap_plain == 55.6 && cap_dcg == 46.3,
           fmt("12 x 80 GHz: penalty %.2f dB @69.4, %.2f dB @55.6, cap %.1f; + 6 x 60 GHz DCG: %.2f dB @55.6, cap %.1f",
               p69, p55, cap_plain, p55_dcg, cap_dcg));
}

void equal_rate_agreement()
{
    const int trials = 500;
    bool ok = true;
    std::string detail;
    for (const auto& link : fixtures()) {
        if (!dcf_only(link)) continue;
        int agree = 0;
        for (int t = 0; t < trials; ++t) {
            SimulatedSource src(link, curves(), {0.15, static_cast<std::uint64_t>(1000 + t)});
            const auto m = run_sweep(src, catalog(), curves(), design_mode(link));
            const auto cap = detect_cap(m);
            std::map<double, std::vector<double>> groups;
            for (const auto& x : m) {
                if (!x.failed && !cap.penalized(x.symbol_rate_gbaud)) groups[x.symbol_rate_gbaud].push_back(*x.gsnr_db);
            }
            bool good = true;
            for (const auto& [rate, g] : groups) {
                if (g.size() < 2) continue;
                double mean = 0.0;
                for (double v : g) mean += v;
                mean /= static_cast<double>(g.size());
                for (double v : g) good = good && std::abs(v - mean) <= 0.35;
            }
            agree += good;
        }
        const double frac = static_cast<double>(agree) / trials;
        ok = ok && frac >= 0.95;
        detail += fmt("%s %.1f%% ", link.name.c_str(), 100.0 * frac);
    }
    report(3, "equal-rate agreement", ok, "sigma 0.15 dB, 500 trials, within 0.35 dB: " + detail);
}

void regime_swap()
{
    const auto link = fixture("R_VIL");
    const auto& ref = equalization_config(catalog());
    // Optimum launch power of the equalization probe by golden-section search.
    auto g = [&](double p) { return ground_truth_gsnr(link, {ref, ConstantPower{p}}); };
    double lo = -10.0, hi = 12.0;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        const double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
        if (g(a) < g(b)) lo = a; else hi = b;
    }
    const double opt = 0.5 * (lo + hi);
    auto verdict = [&](double p) {
        SimulatedSource src(link, curves(), {});
        return classify(build_regime_input(src, catalog(), curves(), p));
    };
    const auto high = verdict(opt + 2.0);
    const auto low = verdict(opt - 1.0);
    report(4, "regime swap", high.regime == Regime::Nonlinear && low.regime == Regime::Linear,
           fmt("R_VIL optimum %.2f dBm; +2 dB: %s (mean delta %+.2f dB); -1 dB: %s (mean delta %+.2f dB)", opt,
               std::string(to_string(high.regime)).c_str(), high.mean_delta_db,
               std::string(to_string(low.regime)).c_str(), low.mean_delta_db));
}

void prediction_soundness()
{
    int checked = 0, mismatched = 0;
    for (const auto& link : fixtures()) {
        SimulatedSource src(link, curves(), {});
        ProbingOptions o;
        o.link_name = link.name;
        o.mode = design_mode(link);
        o.verify = true;
        const auto rep = run_probing(src, catalog(), curves(), o);
        for (const auto& v : *rep.verification) {
            if (std::abs(v.implementation_margin_db) < 0.2) continue;
            ++checked;
            mismatched += v.actual_pass != v.predicted_pass;
        }
    }
    report(5, "prediction soundness", mismatched == 0 && checked > 0,
           fmt("13 fixtures, noiseless: %d of %d clear-margin predictions confirmed", checked - mismatched, checked));
}

void numerical_round_trips()
{
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    double worst_ber = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double ber = std::pow(10.0, -15.0 + 14.7 * u(gen));
        worst_ber = std::max(worst_ber, std::abs(ber_from_q(q_from_ber(ber)) / ber - 1.0));
    }

    double worst_inv = 0.0;
    for (int i = 0; i < 1000; ++i) {
        B2BCurve k;
        k.config_id = "random";
        k.osnr_min_db = -5.0 + 25.0 * u(gen);
        k.osnr_max_db = k.osnr_min_db + 1.0 + 25.0 * u(gen);
        k.b = 0.1 + 2.0 * u(gen);
        const double span = std::max(std::abs(k.osnr_min_db), std::abs(k.osnr_max_db));
        k.a = (2.0 * u(gen) - 1.0) * 0.99 * k.b / (2.0 * span);
        k.c = -20.0 + 40.0 * u(gen);
        check_monotone(k);
        for (int j = 0; j <= 50; ++j) {
            const double x = std::min(k.osnr_max_db, k.osnr_min_db + (k.osnr_max_db - k.osnr_min_db) * j / 50.0);
            worst_inv = std::max(worst_inv, std::abs(gosnr_from_q(k, q_from_osnr(k, x)) - x));
        }
    }

    double worst_sym = 0.0;
    for (int i = 0; i < 200; ++i) {
        LinkSpec link;
        const int spans = 1 + static_cast<int>(u(gen) * 10);
        for (int s = 0; s < spans; ++s) {
            Span sp;
            sp.length_km = 20.0 + 100.0 * u(gen);
            sp.gamma_per_w_km = 0.0;
            link.elements.emplace_back(sp);
            link.elements.emplace_back(Amplifier{4.0 + 3.0 * u(gen), sp.total_loss_db() + 2.0 * u(gen) - 1.0, 40.0});
        }
        link.loopback = u(gen) < 0.5;
        const ConstantPsd psd{1e-4 + 0.05 * u(gen)};
        const double ref = ground_truth_gsnr(link, {catalog().front(), psd});
        for (const auto& c : catalog()) {
            worst_sym = std::max(worst_sym, std::abs(ground_truth_gsnr(link, {c, psd}) - ref));
        }
    }
    report(6, "numerical round trips", worst_ber <= 1e-12 && worst_inv <= 1e-9 && worst_sym <= 1e-9,
           fmt("Q/BER worst relative %.1e; 1000 curves worst inversion %.1e dB; equal-PSD worst spread %.1e dB",
               worst_ber, worst_inv, worst_sym));
}

Span random_span(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Span s;
    s.length_km = 5.0 + 120.0 * u(gen);
    s.attenuation_db_per_km = 0.15 + 0.1 * u(gen);
    s.dispersion_ps_nm_km = 2.0 + 18.0 * u(gen);
    s.gamma_per_w_km = 0.5 + 2.0 * u(gen);
    const double kind = u(gen);
    if (kind < 0.33) {
        s.dcm = Dcf{0.5 + 8.0 * u(gen), 1.2 * u(gen)};
    } else if (kind < 0.5) {
        s.dcm = Dcg{1.0 + 3.0 * u(gen), 50.0 + 40.0 * u(gen), 1 + static_cast<int>(4 * u(gen)), 1.2 * u(gen)};
    }
    return s;
}

void nli_and_ase_laws()
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_cubic = 0.0;
    double worst_ase = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<Element> block;
        const int spans = 1 + static_cast<int>(u(gen) * 4);
        for (int s = 0; s < spans; ++s) {
            const auto sp = random_span(gen);
            block.emplace_back(sp);
            block.emplace_back(Amplifier{3.0 + 4.0 * u(gen), sp.total_loss_db(), 60.0});
            if (u(gen) < 0.3) block.emplace_back(FilterElement{50.0 + 50.0 * u(gen), 1 + static_cast<int>(4 * u(gen)), 0.0});
        }
        LinkSpec one;
        one.name = "random";
        one.elements = block;
        one.loopback = u(gen) < 0.3;
        one.dm_nli_factor = 1.0 + 2.0 * u(gen);

        const auto& c = catalog()[static_cast<std::size_t>(u(gen) * catalog().size())];
        const double psd = std::pow(10.0, -4.0 + 3.0 * u(gen));
        const double step_db = -3.0 + 6.0 * u(gen);
        const double n0 = nli_noise_power(one, {c, ConstantPsd{psd}});
        const double n1 = nli_noise_power(one, {c, ConstantPsd{psd * db_to_linear(step_db)}});
        worst_cubic = std::max(worst_cubic, std::abs(linear_to_db(n1 / n0) / step_db - 3.0));

        const int k = 2 + static_cast<int>(u(gen) * 6);
        LinkSpec many = one;
        many.elements.clear();
        for (int j = 0; j < k; ++j) many.elements.insert(many.elements.end(), block.begin(), block.end());
        const double bw = 5.0 + 100.0 * u(gen);
        worst_ase = std::max(worst_ase, std::abs(ase_noise_power(many, bw) / (k * ase_noise_power(one, bw)) - 1.0));
    }
    report(7, "NLI cubic law and ASE additivity", worst_cubic <= 1e-9 && worst_ase <= 1e-12,
           fmt("1000 random links: worst dNLI/dPSD deviation from 3 is %.1e; worst ASE additivity error %.1e",
               worst_cubic, worst_ase));
}

} // namespace

int main()
{
    averaging_accuracy();
    cap_detection();
    equal_rate_agreement();
    regime_swap();
    prediction_soundness();
    numerical_round_trips();
    nli_and_ase_laws();
    return failures;
}
