#include "ccnet/link_sim.hpp"

#include <cmath>

#include "ccnet/errors.hpp"

namespace ccnet {

LinkSimulator::LinkSimulator(NetworkRealization const& realization, ChannelParams const& params)
{
    params.validate();
    double const alpha = params.pathloss_exp;
    gains_.reserve(realization.size());
    for (double r : realization.interferer_distances) {
        gains_.push_back(std::pow(r, -alpha));
    }
    signal_gain_ = std::pow(realization.typical_distance, -alpha);
    noise_ = params.noise_power / (params.tx_power * params.pathloss_const);
    threshold_ = params.sinr_threshold;
}

bool LinkSimulator::slot_success(std::vector<std::uint8_t> const& active, Engine& rng) const
{
    std::exponential_distribution<double> exp1(1.0);
    double const signal = exp1(rng) * signal_gain_;
    double interference = noise_;
    for (std::size_t i = 0; i < gains_.size(); ++i) {
        if (active[i]) {
            interference += exp1(rng) * gains_[i];
        }
    }
    if (interference == 0.0) {
        return signal > 0.0;
    }
    return signal > threshold_ * interference;
}

BlockAcks LinkSimulator::simulate_block(Protocol protocol, double q, int slots, Engine& rng) const
{
    if (slots < 1) {
        throw InvalidArgument("simulate_block: T must be >= 1");
    }
    BlockAcks out;
    out.access.assign(static_cast<std::size_t>(slots), 0);
    out.acks.assign(static_cast<std::size_t>(slots), 0);
    std::size_t const n = gains_.size();

    if (protocol == Protocol::Block) {
        auto const typical = draw_access_block(q, 1, rng)[0];
        if (!typical) {
            return out;
        }
        auto const active = draw_access_block(q, n, rng);
        for (int t = 0; t < slots; ++t) {
            out.access[static_cast<std::size_t>(t)] = 1;
            bool const s = slot_success(active, rng);
            out.acks[static_cast<std::size_t>(t)] = s ? 1 : 0;
            out.successes += s ? 1 : 0;
        }
        return out;
    }

    auto const typical = draw_access_block(q, static_cast<std::size_t>(slots), rng);
    for (int t = 0; t < slots; ++t) {
        if (!typical[static_cast<std::size_t>(t)]) {
            continue;
        }
        out.access[static_cast<std::size_t>(t)] = 1;
        auto const active = draw_access_block(q, n, rng);
        bool const s = slot_success(active, rng);
        out.acks[static_cast<std::size_t>(t)] = s ? 1 : 0;
        out.successes += s ? 1 : 0;
    }
    return out;
}

}  // namespace ccnet
