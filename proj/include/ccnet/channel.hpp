#pragma once

#include <cstddef>
#include <span>

#include "ccnet/geometry.hpp"
#include "ccnet/random.hpp"

namespace ccnet {

/// Link budget shared by every controller. Powers are linear watts.
struct ChannelParams
{
    double tx_power = 0.0;        ///< eta, W
    double pathloss_const = 0.0;  ///< rho
    double pathloss_exp = 2.0;    ///< alpha
    double noise_power = 0.0;     ///< N0, W
    double sinr_threshold = 1.0;  ///< gamma, linear

    void validate() const;

    /// gamma N0 / (eta rho r0^-alpha): the exponent of the noise-only
    /// success probability at link distance r0.
    double noise_exponent(double typical_distance) const;
};

double dbm_to_watts(double dbm);
double db_to_linear(double db);

/// Thermal noise floor over `bandwidth_hz`, in dBm.
double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db = 0.0);

/// Free-space reference gain (c / (4 pi f_c))^2.
double free_space_gain(double carrier_hz);

/// 24 dBm, 3.2 GHz free-space rho, 200 MHz thermal noise, alpha = 2, 0 dB threshold.
ChannelParams default_channel();

/// One draw of |h|^2 for unit-parameter Rayleigh fading (Exp(1)).
double sample_fading_power(Engine& rng);

/// SINR at the typical actuator. `fading[0]` belongs to the typical link and
/// `fading[k + 1]` to interferer `active[k]`.
double compute_sinr(NetworkRealization const& realization, std::span<std::size_t const> active,
                    std::span<double const> fading, ChannelParams const& params);

/// S(t): 1 iff the typical controller transmits and the SINR strictly exceeds gamma.
bool success_event(double sinr, bool typical_active, double gamma);

/// Per-slot outcome at the typical actuator.
struct SlotOutcome
{
    bool typical_active = false;
    double sinr = 0.0;
    bool success = false;
};

/// r0^-a / (r0^-a + gamma r^-a): probability that one Rayleigh interferer
/// at distance r leaves the typical link above threshold.
double interferer_survival(double typical_distance, double distance, double alpha, double gamma);

/// Success probability given the realization and a fixed set of active interferers.
double cond_success_prob_block(NetworkRealization const& realization, std::span<std::size_t const> active,
                               ChannelParams const& params);

/// Success probability given the realization, with every interferer active
/// independently with probability q.
double cond_success_prob_classical(NetworkRealization const& realization, double q, ChannelParams const& params);

}  // namespace ccnet
