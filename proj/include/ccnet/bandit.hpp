#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "ccnet/aloha.hpp"
#include "ccnet/channel.hpp"
#include "ccnet/geometry.hpp"
#include "ccnet/random.hpp"

namespace ccnet {

/// Beta(a, b) belief over the per-slot reward of one arm.
struct ArmPosterior
{
    double a = 1.0;
    double b = 1.0;
};

void to_json(nlohmann::json& j, ArmPosterior const& p);

/// G1 / (G1 + G2) with G1 ~ Gamma(a, 1), G2 ~ Gamma(b, 1).
double sample_beta(double a, double b, Engine& rng);

/// Thompson draw over all arms; ties go to the lowest index.
std::size_t select_arm(std::span<ArmPosterior const> posteriors, Engine& rng);

/// a += successes, b += T - successes.
ArmPosterior batch_update(ArmPosterior posterior, int block_successes, int T);

struct OracleArm
{
    std::size_t index = 0;
    double mu_star = 0.0;
    std::vector<double> mu;  ///< expected per-block reward of every arm
};

/// mu(q) = T q P_cls(realization, q). Per-slot interferer activity is
/// Bernoulli(q) under both protocols, so the formula is shared.
OracleArm oracle_arm(NetworkRealization const& realization, std::span<double const> arms,
                     ChannelParams const& channel, int T);

enum class RewardMode { TypicalPair, NetworkAverage };

struct TsOptions
{
    Protocol protocol = Protocol::Block;
    int T = 20;
    int K = 5000;
    int snapshot_every = 100;  ///< 0 disables snapshots
    RewardMode reward = RewardMode::TypicalPair;
};

struct RegretTrace
{
    std::vector<double> per_block_gap;
    std::vector<double> cumulative;
    std::vector<std::size_t> chosen_arm;
    std::vector<double> block_reward;
    std::size_t oracle_arm_index = 0;
    std::vector<int> arm_pull_counts;
};

struct PosteriorSnapshot
{
    int block = 0;  ///< number of completed blocks
    std::vector<ArmPosterior> posteriors;
};

struct TsRun
{
    RegretTrace trace;
    OracleArm oracle;
    std::vector<ArmPosterior> posteriors;
    std::vector<PosteriorSnapshot> snapshots;
};

/// Thompson sampling over the arm set on one fixed realization.
TsRun run_ts(NetworkRealization const& realization, std::span<double const> arms, ChannelParams const& channel,
             TsOptions const& options, Engine& rng);

/// C sqrt(T K D log K)
double regret_envelope(int K, int T, int D, double C);

/// sqrt(64 K D log K) + 4 T D
double regret_envelope_explicit(int K, int T, int D);

/// Index of the most frequent entry of chosen[from, end); ties go to the lowest arm.
std::size_t modal_arm(std::span<std::size_t const> chosen, std::size_t from, std::size_t num_arms);

}  // namespace ccnet
