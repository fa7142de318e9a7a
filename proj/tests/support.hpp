#pragma once

#include <map>
#include <random>
#include <string>

#include "chanprobe/bench.hpp"
#include "chanprobe/measurement.hpp"

namespace support {

/// Reports a prescribed true GSNR per configuration, optionally with Gaussian noise on the GSNR.
class GsnrSource final : public chanprobe::MeasurementSource {
public:
    GsnrSource(chanprobe::CurveSet curves, std::map<std::string, double> gsnr, double sigma_db = 0.0,
               std::uint64_t seed = 1)
        : curves_(std::move(curves)), gsnr_(std::move(gsnr)), noise_(0.0, sigma_db > 0 ? sigma_db : 1.0),
          sigma_(sigma_db), gen_(seed)
    {
    }

    double measure(const chanprobe::ProbeStimulus& s) override
    {
        using namespace chanprobe;
        double g = gsnr_.at(s.config.id);
        if (sigma_ > 0) g += noise_(gen_);
        const auto& k = curves_.at(s.config.id);
        return ber_from_q(q_from_osnr(k, gosnr_from_gsnr(g, s.config.symbol_rate_gbaud), Extrapolation::Saturate));
    }

private:
    chanprobe::CurveSet curves_;
    std::map<std::string, double> gsnr_;
    std::normal_distribution<double> noise_;
    double sigma_;
    std::mt19937_64 gen_;
};

inline std::map<std::string, double> uniform_gsnr(const chanprobe::Catalog& cat, double g)
{
    std::map<std::string, double> out;
    for (const auto& c : cat) out[c.id] = g;
    return out;
}

} // namespace support
