#include "ccnet/geometry.hpp"

#include <cmath>
#include <numbers>

#include "ccnet/errors.hpp"

namespace ccnet {

void PppConfig::validate() const
{
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
        throw InvalidArgument("PppConfig: intensity must be finite and >= 0");
    }
    if (!(window_radius > 0.0) || !std::isfinite(window_radius)) {
        throw InvalidArgument("PppConfig: window_radius must be > 0");
    }
    if (!(typical_distance > 0.0)) {
        throw InvalidArgument("PppConfig: typical_distance must be > 0");
    }
    if (typical_distance > window_radius) {
        throw InvalidArgument("PppConfig: typical_distance must not exceed window_radius");
    }
}

double default_window_radius(double intensity, double typical_distance)
{
    double radius = 10.0 * typical_distance;
    if (intensity > 0.0) {
        radius = std::max(radius, 5.0 / std::sqrt(intensity));
    }
    return radius;
}

PppConfig make_ppp_config(double intensity, double typical_distance)
{
    PppConfig c{intensity, default_window_radius(intensity, typical_distance), typical_distance};
    c.validate();
    return c;
}

NetworkRealization sample_ppp(PppConfig const& config, Engine& rng)
{
    config.validate();
    NetworkRealization out;
    out.typical_distance = config.typical_distance;
    out.intensity = config.intensity;
    out.window_radius = config.window_radius;

    double const mean = config.intensity * std::numbers::pi * config.window_radius * config.window_radius;
    if (mean <= 0.0) {
        return out;
    }
    std::poisson_distribution<long> count_dist(mean);
    long const count = count_dist(rng);
    out.interferer_distances.reserve(static_cast<std::size_t>(count));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (long i = 0; i < count; ++i) {
        // 1 - U lies in (0, 1], so every distance is strictly positive.
        double const u = 1.0 - unit(rng);
        out.interferer_distances.push_back(config.window_radius * std::sqrt(u));
    }
    return out;
}

InterferenceMean expected_interference_mean(PppConfig const& config, double alpha, double inner_cutoff)
{
    if (!(alpha > 0.0)) {
        throw InvalidArgument("expected_interference_mean: alpha must be > 0");
    }
    config.validate();
    InterferenceMean out;
    if (config.intensity == 0.0) {
        return out;
    }
    double const r_max = config.window_radius;
    double const r_min = std::min(inner_cutoff, r_max);
    double const scale = 2.0 * std::numbers::pi * config.intensity;
    if (std::abs(alpha - 2.0) < 1e-12) {
        out.diverges = true;
        out.value = scale * std::log(r_max / r_min);
        return out;
    }
    double const e = 2.0 - alpha;
    out.value = scale * (std::pow(r_max, e) - std::pow(r_min, e)) / e;
    return out;
}

void to_json(nlohmann::json& j, NetworkRealization const& r)
{
    j = nlohmann::json{{"lambda", r.intensity},
                       {"R", r.window_radius},
                       {"r0", r.typical_distance},
                       {"distances", r.interferer_distances}};
}

void from_json(nlohmann::json const& j, NetworkRealization& r)
{
    j.at("lambda").get_to(r.intensity);
    j.at("R").get_to(r.window_radius);
    j.at("r0").get_to(r.typical_distance);
    j.at("distances").get_to(r.interferer_distances);
    for (double d : r.interferer_distances) {
        if (!(d > 0.0) || d > r.window_radius) {
            throw InvalidArgument("NetworkRealization: distance outside (0, R]");
        }
    }
}

}  // namespace ccnet
