#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccnet/aloha.hpp"
#include "ccnet/analytics.hpp"
#include "ccnet/bandit.hpp"
#include "ccnet/channel.hpp"
#include "ccnet/control.hpp"
#include "ccnet/geometry.hpp"

namespace ccnet {

enum class SystemKind { Restless, Rested };
enum class GeometryMode { PerBlock, Fixed };
enum class Mode { ControllabilitySweep, TsRun, AnalyticCompare, RegretStudy };

std::string to_string(SystemKind s);
SystemKind parse_system(std::string const& text);
std::string to_string(GeometryMode g);
GeometryMode parse_geometry_mode(std::string const& text);

/// Plant description; an empty A selects default_plant(v).
struct PlantSpec
{
    Matrix a;
    Matrix b;
    Vector x_des;
    Vector x0;  ///< initial state of every block; zeros when empty
    double process_noise_std = 0.0;

    LtiSystem build(int v) const;
    Vector initial_state(Eigen::Index n) const;
};

struct ExperimentConfig
{
    std::vector<double> lambdas{5e-3};
    double window_radius = 0.0;  ///< 0 selects default_window_radius per lambda
    double typical_distance = 10.0;
    ChannelParams channel = default_channel();
    PlantSpec plant;
    std::vector<Protocol> protocols{Protocol::Block, Protocol::Classical};
    std::vector<SystemKind> systems{SystemKind::Restless, SystemKind::Rested};
    std::vector<double> q_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> arms{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> betas{0.5, 0.7, 0.9};
    std::vector<double> meta_q{1.0};
    int T = 20;
    std::vector<int> horizons{4};
    int K = 5000;
    int num_realizations = 10000;
    std::uint64_t seed = 1;
    Mode mode = Mode::ControllabilitySweep;
    GeometryMode geometry = GeometryMode::PerBlock;
    QuadratureSpec quad;
    RewardMode reward = RewardMode::TypicalPair;
    int snapshot_every = 100;
    unsigned threads = 1;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    double window_for(double lambda) const;
    PppConfig ppp_for(double lambda) const;
    NetworkModel model_for(double lambda) const;
    QuadratureSpec quad_for(double lambda) const;
};

struct SweepResult
{
    Protocol protocol = Protocol::Block;
    SystemKind system = SystemKind::Restless;
    double q = 0.0;
    double lambda = 0.0;
    int v = 0;
    double estimate = 0.0;
    double half_width_95 = 0.0;
    long n_samples = 0;
    std::optional<double> analytic;
};

/// The realization shared by every block in fixed-geometry mode.
NetworkRealization fixed_realization(ExperimentConfig const& config, std::size_t lambda_index);

/// Empirical block-controllability frequency for every (lambda, v, protocol,
/// q, system). Restless and rested loops replay the same acknowledgments.
/// When `with_analytic` is set the matching closed form is attached.
std::vector<SweepResult> estimate_block_controllability(ExperimentConfig const& config, bool with_analytic = false);

struct MetaEmpirical
{
    double fraction = 0.0;
    double half_width_95 = 0.0;
    long n_samples = 0;
    std::optional<double> threshold;
};

/// Fraction of `num_realizations` realizations whose conditional success
/// probability reaches the inverse-tail threshold.
MetaEmpirical empirical_meta_distribution(ExperimentConfig const& config, double lambda, int v, double q,
                                          double beta, Protocol protocol, std::uint64_t stream_tag);

struct ComparisonRow
{
    std::string kind;  ///< "restless" or "meta"
    Protocol protocol = Protocol::Block;
    double q = 0.0;
    double lambda = 0.0;
    int v = 0;
    std::optional<double> beta;
    double empirical = 0.0;
    double half_width_95 = 0.0;
    double analytic = 0.0;
    double analytic_error = 0.0;
    double abs_diff = 0.0;
    double tolerance = 0.0;
    bool passes = false;
};

/// Restless rows pass iff |diff| <= max(0.02, 3 half_width); meta rows iff
/// |diff| <= 0.02.
std::vector<ComparisonRow> compare_analytic_empirical(ExperimentConfig const& config);

struct RegretStudy
{
    double lambda = 0.0;
    std::vector<double> mean_cumulative;  ///< index k - 1
    std::vector<double> envelope;         ///< explicit bound at each k
    double max_ratio = 0.0;               ///< max over 1000 <= k <= K/2 of R(2k) / R(k)
    bool below_envelope = true;
    std::vector<std::size_t> oracle_hits; ///< per run: 1 when the modal late arm is the oracle arm
};

/// num_realizations independent TS runs per lambda.
std::vector<RegretStudy> run_regret_study(ExperimentConfig const& config);

/// One TS run per lambda on a seeded realization.
struct TsOutcome
{
    double lambda = 0.0;
    NetworkRealization realization;
    TsRun run;
};

std::vector<TsOutcome> run_ts_experiment(ExperimentConfig const& config);

struct AnalyticRow
{
    Protocol protocol = Protocol::Block;
    double q = 0.0;
    double lambda = 0.0;
    int T = 0;
    int v = 0;
    std::optional<double> beta;  ///< set for meta-distribution rows
    double value = 0.0;
    double abs_error = 0.0;
    bool precision_warning = false;
};

/// Restless controllability over q_grid, then the rested meta distribution
/// over meta_q x betas, for every lambda, v and protocol.
std::vector<AnalyticRow> run_analytic_sweep(ExperimentConfig const& config);

}  // namespace ccnet
