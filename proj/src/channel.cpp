#include "ccnet/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ccnet/errors.hpp"

namespace ccnet {
namespace {

constexpr double kSpeedOfLight = 299792458.0;

// gamma (r0 / r)^alpha, the normalized interference-to-signal path ratio.
double path_ratio(double typical_distance, double distance, double alpha, double gamma)
{
    return gamma * std::pow(typical_distance / distance, alpha);
}

}  // namespace

void ChannelParams::validate() const
{
    if (!(tx_power > 0.0)) {
        throw InvalidArgument("ChannelParams: tx_power must be > 0");
    }
    if (!(pathloss_const > 0.0)) {
        throw InvalidArgument("ChannelParams: pathloss_const must be > 0");
    }
    if (!(pathloss_exp >= 2.0)) {
        throw InvalidArgument("ChannelParams: pathloss_exp must be >= 2");
    }
    if (!(noise_power >= 0.0)) {
        throw InvalidArgument("ChannelParams: noise_power must be >= 0");
    }
    if (!(sinr_threshold > 0.0)) {
        throw InvalidArgument("ChannelParams: sinr_threshold must be > 0");
    }
}

double ChannelParams::noise_exponent(double typical_distance) const
{
    double const received = tx_power * pathloss_const * std::pow(typical_distance, -pathloss_exp);
    return sinr_threshold * noise_power / received;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db)
{
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double free_space_gain(double carrier_hz)
{
    double const g = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_hz);
    return g * g;
}

ChannelParams default_channel()
{
    ChannelParams p;
    p.tx_power = dbm_to_watts(24.0);
    p.pathloss_const = free_space_gain(3.2e9);
    p.pathloss_exp = 2.0;
    p.noise_power = dbm_to_watts(thermal_noise_dbm(200e6));
    p.sinr_threshold = 1.0;
    return p;
}

double sample_fading_power(Engine& rng)
{
    std::exponential_distribution<double> exp1(1.0);
    return exp1(rng);
}

double compute_sinr(NetworkRealization const& realization, std::span<std::size_t const> active,
                    std::span<double const> fading, ChannelParams const& params)
{
    if (fading.size() != active.size() + 1) {
        throw InvalidArgument("compute_sinr: need one fading draw per active link plus the typical link");
    }
    double const scale = params.tx_power * params.pathloss_const;
    double const signal = scale * fading[0] * std::pow(realization.typical_distance, -params.pathloss_exp);
    double interference = params.noise_power;
    for (std::size_t k = 0; k < active.size(); ++k) {
        double const r = realization.interferer_distances.at(active[k]);
        interference += scale * fading[k + 1] * std::pow(r, -params.pathloss_exp);
    }
    if (interference == 0.0) {
        if (signal == 0.0) {
            throw DegenerateInput("compute_sinr: zero signal with zero noise and no interference");
        }
        return std::numeric_limits<double>::infinity();
    }
    return signal / interference;
}

bool success_event(double sinr, bool typical_active, double gamma) { return typical_active && sinr > gamma; }

double interferer_survival(double typical_distance, double distance, double alpha, double gamma)
{
    return 1.0 / (1.0 + path_ratio(typical_distance, distance, alpha, gamma));
}

double cond_success_prob_block(NetworkRealization const& realization, std::span<std::size_t const> active,
                               ChannelParams const& params)
{
    double log_p = -params.noise_exponent(realization.typical_distance);
    for (std::size_t i : active) {
        double const r = realization.interferer_distances.at(i);
        log_p -= std::log1p(path_ratio(realization.typical_distance, r, params.pathloss_exp, params.sinr_threshold));
    }
    return std::exp(log_p);
}

double cond_success_prob_classical(NetworkRealization const& realization, double q, ChannelParams const& params)
{
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidArgument("cond_success_prob_classical: q must lie in [0, 1]");
    }
    double log_p = -params.noise_exponent(realization.typical_distance);
    if (q == 0.0) {
        return std::exp(log_p);
    }
    for (double r : realization.interferer_distances) {
        double const x = path_ratio(realization.typical_distance, r, params.pathloss_exp, params.sinr_threshold);
        // q * survival + 1 - q = 1 - q * x / (1 + x)
        log_p += (q == 1.0) ? -std::log1p(x) : std::log1p(-q * x / (1.0 + x));
    }
    return std::exp(log_p);
}

}  // namespace ccnet
