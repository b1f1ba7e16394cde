#include "ccnet/aloha.hpp"

#include "ccnet/errors.hpp"

namespace ccnet {
namespace {

void check_q(double q, char const* who)
{
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidArgument(std::string(who) + ": q must lie in [0, 1]");
    }
}

// Bernoulli(q) with the endpoints short-circuited, so q = 0 and q = 1
// consume no randomness and stay exact.
struct Coin
{
    double q;
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    std::uint8_t operator()(Engine& rng)
    {
        if (q <= 0.0) {
            return 0;
        }
        if (q >= 1.0) {
            return 1;
        }
        return unit(rng) < q ? 1 : 0;
    }
};

}  // namespace

std::string to_string(Protocol p) { return p == Protocol::Block ? "block" : "classical"; }

Protocol parse_protocol(std::string const& text)
{
    if (text == "block") {
        return Protocol::Block;
    }
    if (text == "classical") {
        return Protocol::Classical;
    }
    throw InvalidArgument("unknown protocol '" + text + "' (expected block or classical)");
}

void AlohaPolicy::validate() const
{
    check_q(q, "AlohaPolicy");
    for (std::size_t i = 0; i < arms.size(); ++i) {
        if (!(arms[i] > 0.0 && arms[i] <= 1.0)) {
            throw InvalidArgument("AlohaPolicy: arms must lie in (0, 1]");
        }
        if (i > 0 && !(arms[i] > arms[i - 1])) {
            throw InvalidArgument("AlohaPolicy: arms must be strictly increasing");
        }
    }
}

std::vector<std::uint8_t> draw_access_block(double q, std::size_t num_nodes, Engine& rng)
{
    check_q(q, "draw_access_block");
    Coin coin{q};
    std::vector<std::uint8_t> out(num_nodes);
    for (auto& s : out) {
        s = coin(rng);
    }
    return out;
}

AccessGrid draw_access_classical(double q, std::size_t num_nodes, int slots, Engine& rng)
{
    check_q(q, "draw_access_classical");
    if (slots < 1) {
        throw InvalidArgument("draw_access_classical: T must be >= 1");
    }
    Coin coin{q};
    AccessGrid grid{num_nodes, slots, std::vector<std::uint8_t>(num_nodes * static_cast<std::size_t>(slots))};
    for (auto& s : grid.cells) {
        s = coin(rng);
    }
    return grid;
}

}  // namespace ccnet
