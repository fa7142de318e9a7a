#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "chanprobe.hpp"

namespace fs = std::filesystem;
using namespace chanprobe;

namespace {

enum Exit { kOk = 0, kInput = 2, kEngine = 3, kBudget = 4 };

class IoError : public Error {
    using Error::Error;
};

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

json read_json(const std::string& path)
{
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path, e.what());
    }
}

template <typename Writer>
void emit(const std::optional<std::string>& path, Writer&& write)
{
    if (!path) {
        write(std::cout);
        return;
    }
    std::ofstream out(*path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + *path);
    write(out);
    if (!out) throw IoError("write failed: " + *path);
}

void emit_json(const std::optional<std::string>& path, const json& j)
{
    emit(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

struct CharacterizeArgs {
    std::string b2b;
    double fec_ber = kDefaultFecThresholdBer;
    std::string config_id;
    std::optional<std::string> out;
};

int cmd_characterize(const CharacterizeArgs& a)
{
    auto in = open_in(a.b2b);
    const auto samples = read_b2b_csv(in, a.b2b);
    const std::string id = a.config_id.empty() ? fs::path(a.b2b).stem().string() : a.config_id;
    emit_json(a.out, to_json(fit_b2b(samples, a.fec_ber, id)));
    return kOk;
}

int cmd_fixtures(const std::string& dir)
{
    fs::create_directories(dir);
    for (const auto& link : fixtures()) {
        emit_json((fs::path(dir) / (link.name + ".json")).string(), to_json(link));
    }
    return kOk;
}

struct CatalogArgs {
    BenchModel bench;
    std::optional<std::string> out;
};

int cmd_catalog(const CatalogArgs& a)
{
    const auto cat = default_catalog();
    emit_json(a.out, to_json(cat, characterize(cat, a.bench)));
    return kOk;
}

struct ProbeArgs {
    std::string link;
    std::string fixture;
    std::string measurements;
    std::string catalog;
    std::string mode = "psd";
    std::optional<double> psd;
    std::optional<double> power;
    double threshold_db = kDefaultCapThresholdDb;
    double margin_db = 0.0;
    int repeats = 1;
    std::uint64_t seed = 0;
    double sigma_db = 0.0;
    bool regime = false;
    std::optional<double> regime_power;
    double regime_tolerance_db = kDefaultRegimeToleranceDb;
    bool verify = false;
    bool median = false;
    std::string baseline = "running";
    std::optional<std::string> out;
    std::optional<std::string> margins_csv;
    std::optional<std::string> regime_csv;
};

int cmd_probe(const ProbeArgs& a)
{
    Catalog cat;
    CurveSet curves;
    if (a.catalog.empty()) {
        cat = default_catalog();
        curves = characterize(cat);
    } else {
        auto doc = catalog_from_json(read_json(a.catalog));
        cat = std::move(doc.configs);
        curves = std::move(doc.curves);
    }

    std::optional<LinkSpec> link;
    if (!a.link.empty()) {
        const auto j = read_json(a.link);
        try {
            link = link_from_json(j);
        } catch (const SchemaError& e) {
            throw SchemaError(a.link + "#" + e.location(), std::string(e.what()).substr(e.location().size() + 2));
        }
    } else if (!a.fixture.empty()) {
        link = fixture(a.fixture);
    }

    PowerMode mode;
    if (a.mode == "power") {
        if (!a.power) throw SchemaError("--power", "required in power mode");
        mode = ConstantPower{*a.power};
    } else {
        const auto psd = a.psd ? a.psd : (link ? link->design_psd_mw_per_ghz : std::nullopt);
        if (!psd) throw SchemaError("--psd", "required in psd mode (the link declares no design PSD)");
        if (!(*psd > 0.0)) throw SchemaError("--psd", "must be positive");
        mode = ConstantPsd{*psd};
    }

    std::unique_ptr<MeasurementSource> source;
    std::string name;
    if (link) {
        source = std::make_unique<SimulatedSource>(*link, curves, NoiseModel{a.sigma_db, a.seed});
        name = link->name;
    } else {
        auto in = open_in(a.measurements);
        source = std::make_unique<RecordedSource>(in, a.measurements);
        name = fs::path(a.measurements).stem().string();
    }

    ProbingOptions o;
    o.link_name = name;
    o.mode = mode;
    o.repeats = a.repeats;
    o.threshold_db = a.threshold_db;
    o.baseline = a.baseline == "lowest" ? CapBaseline::LowestGroup : CapBaseline::RunningMean;
    o.averaging = a.median ? Averaging::Median : Averaging::Mean;
    o.extra_system_margin_db = a.margin_db;
    o.verify = a.verify;
    o.regime_tolerance_db = a.regime_tolerance_db;
    if (a.regime) {
        // Reference point: the equalization probe's launch power in the chosen mode.
        o.regime_reference_dbm = a.regime_power ? *a.regime_power
                                                : launch_power({equalization_config(cat), mode});
    }

    const auto report = run_probing(*source, cat, curves, o);
    emit_json(a.out, to_json(report));
    if (a.margins_csv) {
        emit(a.margins_csv, [&](std::ostream& os) { write_margins_csv(os, report.margins); });
    }
    if (a.regime_csv && report.regime) {
        emit(a.regime_csv, [&](std::ostream& os) { write_regime_csv(os, report.regime->input); });
    }
    return kOk;
}

int run(int argc, char** argv)
{
    CLI::App app{"Extended channel probing: GSNR estimation, symbol-rate caps and operation regime"};
    app.require_subcommand(1);

    CharacterizeArgs ca;
    auto* characterize_cmd = app.add_subcommand("characterize", "Fit a back-to-back Q-over-OSNR curve");
    characterize_cmd->add_option("--b2b", ca.b2b, "CSV with header osnr_db,q_db")->required();
    characterize_cmd->add_option("--fec-ber", ca.fec_ber, "Pre-FEC BER threshold")->check(CLI::Range(1e-15, 0.5));
    characterize_cmd->add_option("--config-id", ca.config_id, "Configuration id (default: file stem)");
    characterize_cmd->add_option("--out", ca.out, "Output JSON (default: stdout)");

    std::string fixtures_dir;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the test-link JSON files");
    fixtures_cmd->add_option("--out", fixtures_dir, "Output directory")->required();

    CatalogArgs cg;
    auto* catalog_cmd = app.add_subcommand("catalog", "Write the default catalog with bench-characterized curves");
    catalog_cmd->add_option("--out", cg.out, "Output JSON (default: stdout)");
    catalog_cmd->add_option("--tx-snr-db", cg.bench.tx_snr_db, "Transmitter SNR ceiling of the bench model");
    catalog_cmd->add_option("--fec-ber", cg.bench.fec_threshold_ber, "Pre-FEC BER threshold")
        ->check(CLI::Range(1e-15, 0.5));

    ProbeArgs pa;
    auto* probe_cmd = app.add_subcommand("probe", "Run the probing pipeline and emit a report");
    auto* src = probe_cmd->add_option_group("source");
    src->add_option("--link", pa.link, "Link JSON (simulated measurements)");
    src->add_option("--fixture", pa.fixture, "Built-in fixture name (simulated measurements)");
    src->add_option("--measurements", pa.measurements, "Recorded readings CSV (config_id,mode,ber)");
    src->require_option(1);
    probe_cmd->add_option("--catalog", pa.catalog, "Catalog+curves JSON (default: built-in)");
    probe_cmd->add_option("--mode", pa.mode, "Probe power mode")->check(CLI::IsMember({"psd", "power"}));
    probe_cmd->add_option("--psd", pa.psd, "Constant PSD in mW/GHz (default: the link's design PSD)");
    probe_cmd->add_option("--power", pa.power, "Constant launch power in dBm");
    probe_cmd->add_option("--threshold-db", pa.threshold_db, "Severe-penalty threshold for the cap")
        ->check(CLI::Range(0.0, 30.0));
    probe_cmd->add_option("--margin-db", pa.margin_db, "Extra system margin")->check(CLI::Range(-10.0, 30.0));
    probe_cmd->add_option("--repeats", pa.repeats, "Readings per configuration")->check(CLI::Range(1, 100000));
    probe_cmd->add_option("--seed", pa.seed, "Noise seed");
    probe_cmd->add_option("--sigma-db", pa.sigma_db, "Q readout noise (dB)")->check(CLI::Range(0.0, 10.0));
    probe_cmd->add_flag("--regime", pa.regime, "Also run the constant-PSD vs constant-power regime test");
    probe_cmd->add_option("--regime-power", pa.regime_power, "Regime reference power in dBm");
    probe_cmd->add_option("--regime-tolerance-db", pa.regime_tolerance_db, "Regime dead band")
        ->check(CLI::Range(0.0, 10.0));
    probe_cmd->add_flag("--verify", pa.verify, "Re-measure candidates and compare with predictions");
    probe_cmd->add_flag("--median", pa.median, "Average with the median instead of the mean");
    probe_cmd->add_option("--baseline", pa.baseline, "Cap baseline")->check(CLI::IsMember({"running", "lowest"}));
    probe_cmd->add_option("--out", pa.out, "Report JSON (default: stdout)");
    probe_cmd->add_option("--margins-csv", pa.margins_csv, "Margins table CSV");
    probe_cmd->add_option("--regime-csv", pa.regime_csv, "Regime plot data CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    if (*characterize_cmd) return cmd_characterize(ca);
    if (*fixtures_cmd) return cmd_fixtures(fixtures_dir);
    if (*catalog_cmd) return cmd_catalog(cg);
    return cmd_probe(pa);
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const PowerBudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBudget;
    } catch (const CharacterizationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngine;
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngine;
    } catch (const RegimeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngine;
    } catch (const InversionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngine;
    } catch (const ExtrapolationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngine;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
}
