#pragma once

#include <vector>

#include "json.hpp"

#include "ccnet/random.hpp"

namespace ccnet {

/// Poisson field of interfering controllers around a typical pair whose
/// actuator sits at the origin. Sampling is confined to a disk window.
struct PppConfig
{
    double intensity = 0.0;         ///< controllers per m^2
    double window_radius = 100.0;   ///< m
    double typical_distance = 10.0; ///< controller-actuator distance of the typical pair, m

    /// Throws InvalidArgument naming the violated invariant.
    void validate() const;
};

/// max(10 r0, 5 / sqrt(lambda)); the second term is dropped when lambda = 0.
double default_window_radius(double intensity, double typical_distance);

PppConfig make_ppp_config(double intensity, double typical_distance);

/// One sampled point pattern. Only distances to the typical actuator are
/// kept; every analytic quantity depends on them alone.
struct NetworkRealization
{
    std::vector<double> interferer_distances;
    double typical_distance = 10.0;
    double intensity = 0.0;
    double window_radius = 100.0;

    std::size_t size() const noexcept { return interferer_distances.size(); }
};

/// Draws N ~ Poisson(lambda pi R^2) interferers uniform on the disk.
NetworkRealization sample_ppp(PppConfig const& config, Engine& rng);

struct InterferenceMean
{
    double value = 0.0;
    bool diverges = false; ///< alpha = 2: grows like log(R / r_min)
};

/// Campbell mean of sum_i r_i^(-alpha) over the window, with the integral
/// started at `inner_cutoff` so the result stays finite.
InterferenceMean expected_interference_mean(PppConfig const& config, double alpha, double inner_cutoff = 1e-3);

void to_json(nlohmann::json& j, NetworkRealization const& r);
void from_json(nlohmann::json const& j, NetworkRealization& r);

}  // namespace ccnet
