#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccnet/random.hpp"

namespace ccnet {

enum class Protocol { Classical, Block };

std::string to_string(Protocol p);
Protocol parse_protocol(std::string const& text);

struct AlohaPolicy
{
    Protocol protocol = Protocol::Block;
    double q = 1.0;
    std::vector<double> arms;  ///< strictly increasing, each in (0, 1]

    void validate() const;
};

/// One access state per node, held for the whole block.
std::vector<std::uint8_t> draw_access_block(double q, std::size_t num_nodes, Engine& rng);

/// Row-major nodes x slots grid of i.i.d. Bernoulli(q) access states.
struct AccessGrid
{
    std::size_t num_nodes = 0;
    int slots = 0;
    std::vector<std::uint8_t> cells;

    std::uint8_t at(std::size_t node, int slot) const { return cells[node * static_cast<std::size_t>(slots) + slot]; }
};

AccessGrid draw_access_classical(double q, std::size_t num_nodes, int slots, Engine& rng);

}  // namespace ccnet
