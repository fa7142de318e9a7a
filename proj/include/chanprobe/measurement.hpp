#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/csv.hpp"
#include "chanprobe/link_model.hpp"

namespace chanprobe {

/// Anything that can put a probe on the line and report the receiver BER.
/// Repeated calls with the same stimulus may return different readings.
class MeasurementSource {
public:
    virtual ~MeasurementSource() = default;
    virtual double measure(const ProbeStimulus& stimulus) = 0;
};

/// Readings synthesized by the link simulator. The n-th call uses noise stream n.
class SimulatedSource final : public MeasurementSource {
public:
    SimulatedSource(LinkSpec link, CurveSet curves, NoiseModel noise)
        : link_(std::move(link)), curves_(std::move(curves)), noise_(noise)
    {
        validate(link_);
    }

    double measure(const ProbeStimulus& stimulus) override
    {
        const auto& curve = curve_for(curves_, stimulus.config);
        return simulate_measurement(link_, stimulus, curve, noise_, calls_++);
    }

    const LinkSpec& link() const { return link_; }
    std::uint64_t calls() const { return calls_; }

private:
    LinkSpec link_;
    CurveSet curves_;
    NoiseModel noise_;
    std::uint64_t calls_ = 0;
};

/// Field readings ingested from CSV (`config_id,mode,ber`), replayed in file order
/// per (config, mode).
class RecordedSource final : public MeasurementSource {
public:
    explicit RecordedSource(std::istream& in, const std::string& origin = "measurements")
    {
        const auto rows = read_csv(in, {"config_id", "mode", "ber"}, origin);
        for (const auto& r : rows) {
            const std::string where = origin + ":" + std::to_string(r.line);
            if (r[1] != "psd" && r[1] != "power") {
                throw SchemaError(where + "/mode", "expected 'psd' or 'power', got '" + r[1] + "'");
            }
            readings_[{r[0], r[1]}].push_back(parse_double(r[2], where + "/ber"));
        }
    }

    double measure(const ProbeStimulus& stimulus) override
    {
        const std::pair<std::string, std::string> key{stimulus.config.id, mode_name(stimulus.mode)};
        auto it = readings_.find(key);
        std::size_t& next = cursor_[key];
        if (it == readings_.end() || next >= it->second.size()) {
            throw SourceError("no " + key.second + "-mode reading left for configuration " + key.first);
        }
        return it->second[next++];
    }

    bool has_mode(const std::string& mode) const
    {
        for (const auto& [k, v] : readings_) {
            if (k.second == mode) return true;
        }
        return false;
    }

private:
    std::map<std::pair<std::string, std::string>, std::vector<double>> readings_;
    std::map<std::pair<std::string, std::string>, std::size_t> cursor_;
};

} // namespace chanprobe
