#pragma once

#include <cstdint>
#include <vector>

#include "ccnet/aloha.hpp"
#include "ccnet/channel.hpp"
#include "ccnet/geometry.hpp"

namespace ccnet {

/// Access states and acknowledgments of the typical pair over one block.
struct BlockAcks
{
    std::vector<std::uint8_t> access;
    std::vector<std::uint8_t> acks;
    int successes = 0;
};

/// Slot-level simulator for the typical link of one realization. Path gains
/// are computed once; every slot draws fresh Rayleigh fading for the typical
/// link and each active interferer.
class LinkSimulator
{
  public:
    LinkSimulator(NetworkRealization const& realization, ChannelParams const& params);

    /// One block: typical and interferer access follow `protocol` with
    /// probability q; idle typical slots carry no acknowledgment.
    BlockAcks simulate_block(Protocol protocol, double q, int slots, Engine& rng) const;

    /// S(t) for one slot in which the typical controller transmits, with the
    /// interferers flagged in `active` (one entry per interferer).
    bool slot_success(std::vector<std::uint8_t> const& active, Engine& rng) const;

    std::size_t num_interferers() const noexcept { return gains_.size(); }

  private:
    std::vector<double> gains_;  // r_i^-alpha
    double signal_gain_ = 0.0;   // r0^-alpha
    double noise_ = 0.0;         // N0 / (eta rho)
    double threshold_ = 1.0;
};

}  // namespace ccnet
