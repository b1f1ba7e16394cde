#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ccnet {

/// Engine used by every stochastic operation. Callers own their engines.
using Engine = std::mt19937_64;

/// One step of the SplitMix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent engine for the substream addressed by `path`
/// beneath `root_seed`. The mapping depends only on (root_seed, path), so
/// work can be split across threads without changing any draw.
Engine make_stream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path);

/// 64-bit FNV-1a over a byte string. Stable across platforms.
std::uint64_t fnv1a64(const void* data, std::size_t size);

}  // namespace ccnet
