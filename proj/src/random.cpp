#include "ccnet/random.hpp"

namespace ccnet {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Engine make_stream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t state = root_seed;
    std::uint64_t key = splitmix64(state);
    for (std::uint64_t p : path) {
        state = key ^ (p * 0xD1B54A32D192ED03ULL);
        key = splitmix64(state);
    }
    std::uint64_t words[4];
    for (auto& w : words) {
        w = splitmix64(key);
    }
    std::seed_seq seq{static_cast<std::uint32_t>(words[0]), static_cast<std::uint32_t>(words[0] >> 32),
                      static_cast<std::uint32_t>(words[1]), static_cast<std::uint32_t>(words[1] >> 32),
                      static_cast<std::uint32_t>(words[2]), static_cast<std::uint32_t>(words[2] >> 32),
                      static_cast<std::uint32_t>(words[3]), static_cast<std::uint32_t>(words[3] >> 32)};
    return Engine(seq);
}

std::uint64_t fnv1a64(const void* data, std::size_t size)
{
    auto const* bytes = static_cast<unsigned char const*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ccnet
