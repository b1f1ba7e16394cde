#include "ccnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "ccnet/errors.hpp"
#include "ccnet/link_sim.hpp"
#include "ccnet/parallel.hpp"

namespace ccnet {
namespace {

// Top-level substream tags; every random draw hangs below one of these.
constexpr std::uint64_t kSweepStream = 1;
constexpr std::uint64_t kMetaStream = 2;
constexpr std::uint64_t kRegretStream = 3;
constexpr std::uint64_t kTsStream = 4;
constexpr std::uint64_t kFixedGeometryStream = 5;

double half_width(double p, long n)
{
    if (n <= 0) {
        return 0.0;
    }
    return 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

std::uint64_t protocol_tag(Protocol p) { return p == Protocol::Block ? 0 : 1; }

void fail(char const* key, std::string const& what) { throw ConfigError(key, what); }

}  // namespace

std::string to_string(SystemKind s) { return s == SystemKind::Restless ? "restless" : "rested"; }

SystemKind parse_system(std::string const& text)
{
    if (text == "restless") {
        return SystemKind::Restless;
    }
    if (text == "rested") {
        return SystemKind::Rested;
    }
    throw InvalidArgument("unknown system '" + text + "' (expected restless or rested)");
}

std::string to_string(GeometryMode g) { return g == GeometryMode::PerBlock ? "per_block" : "fixed"; }

GeometryMode parse_geometry_mode(std::string const& text)
{
    if (text == "per_block") {
        return GeometryMode::PerBlock;
    }
    if (text == "fixed") {
        return GeometryMode::Fixed;
    }
    throw InvalidArgument("unknown geometry mode '" + text + "' (expected per_block or fixed)");
}

LtiSystem PlantSpec::build(int v) const
{
    if (a.size() == 0) {
        return default_plant(v, process_noise_std);
    }
    Vector target = x_des.size() ? x_des : Vector::Ones(a.rows());
    return LtiSystem(a, b, target, v, process_noise_std);
}

Vector PlantSpec::initial_state(Eigen::Index n) const
{
    if (x0.size() == 0) {
        return Vector::Zero(n);
    }
    if (x0.size() != n) {
        throw InvalidArgument("PlantSpec: x0 dimension does not match the plant");
    }
    return x0;
}

void ExperimentConfig::validate() const
{
    if (lambdas.empty()) {
        fail("lambda", "at least one intensity is required");
    }
    for (double l : lambdas) {
        if (!(l >= 0.0) || !std::isfinite(l)) {
            fail("lambda", "must be finite and >= 0");
        }
    }
    if (!(typical_distance > 0.0)) {
        fail("r0", "must be > 0");
    }
    if (!(window_radius >= 0.0)) {
        fail("window_radius", "must be > 0 (or auto)");
    }
    if (window_radius > 0.0 && window_radius < typical_distance) {
        fail("window_radius", "must not be smaller than r0");
    }
    if (!(channel.pathloss_exp >= 2.0)) {
        fail("alpha", "must be >= 2");
    }
    if (!(channel.sinr_threshold > 0.0)) {
        fail("gamma_db", "threshold must be positive");
    }
    if (!(channel.tx_power > 0.0)) {
        fail("tx_power_dbm", "must give a positive power");
    }
    if (!(channel.pathloss_const > 0.0)) {
        fail("rho", "must be > 0");
    }
    if (!(channel.noise_power >= 0.0)) {
        fail("noise_power_dbm", "must give a non-negative power");
    }
    if (protocols.empty()) {
        fail("protocol", "at least one protocol is required");
    }
    if (systems.empty()) {
        fail("system", "at least one system is required");
    }
    for (double q : q_grid) {
        if (!(q >= 0.0 && q <= 1.0)) {
            fail("q_grid", "entries must lie in [0, 1]");
        }
    }
    try {
        AlohaPolicy{Protocol::Block, 1.0, arms}.validate();
    } catch (InvalidArgument const& e) {
        fail("arms", e.what());
    }
    if (arms.empty()) {
        fail("arms", "at least one arm is required");
    }
    for (double b : betas) {
        if (!(b > 0.0 && b < 1.0)) {
            fail("betas", "entries must lie in (0, 1)");
        }
    }
    for (double q : meta_q) {
        if (!(q > 0.0 && q <= 1.0)) {
            fail("meta_q", "entries must lie in (0, 1]");
        }
    }
    if (T < 1) {
        fail("T", "must be >= 1");
    }
    if (horizons.empty()) {
        fail("v", "at least one horizon is required");
    }
    for (int v : horizons) {
        if (v < 1 || v > T) {
            fail("v", "must satisfy 1 <= v <= T");
        }
        try {
            plant.build(v);
        } catch (InvalidArgument const& e) {
            fail("A", e.what());
        }
    }
    if (K < 1) {
        fail("K", "must be >= 1");
    }
    if (num_realizations < 1) {
        fail("num_realizations", "must be >= 1");
    }
    if (!(plant.process_noise_std >= 0.0)) {
        fail("process_noise_std", "must be >= 0");
    }
    if (snapshot_every < 0) {
        fail("snapshot_every", "must be >= 0");
    }
    if (threads < 1) {
        fail("threads", "must be >= 1");
    }
    try {
        QuadratureSpec q = quad;
        q.outer_limit = 1.0;
        q.validate();
    } catch (InvalidArgument const& e) {
        fail("quad_rel_tol", e.what());
    }
    if (quad.infinite_plane && channel.pathloss_exp <= 2.0) {
        fail("infinite_plane", "requires alpha > 2");
    }
}

double ExperimentConfig::window_for(double lambda) const
{
    return window_radius > 0.0 ? window_radius : default_window_radius(lambda, typical_distance);
}

PppConfig ExperimentConfig::ppp_for(double lambda) const
{
    PppConfig c{lambda, window_for(lambda), typical_distance};
    c.validate();
    return c;
}

NetworkModel ExperimentConfig::model_for(double lambda) const
{
    NetworkModel m;
    m.lambda = lambda;
    m.typical_distance = typical_distance;
    m.channel = channel;
    return m;
}

QuadratureSpec ExperimentConfig::quad_for(double lambda) const
{
    QuadratureSpec q = quad;
    q.outer_limit = window_for(lambda);
    return q;
}

NetworkRealization fixed_realization(ExperimentConfig const& config, std::size_t lambda_index)
{
    Engine g = make_stream(config.seed, {kFixedGeometryStream, lambda_index});
    return sample_ppp(config.ppp_for(config.lambdas.at(lambda_index)), g);
}

std::vector<SweepResult> estimate_block_controllability(ExperimentConfig const& config, bool with_analytic)
{
    config.validate();
    std::vector<SweepResult> out;
    auto const n = static_cast<std::size_t>(config.num_realizations);
    bool const want_restless = std::find(config.systems.begin(), config.systems.end(), SystemKind::Restless)
                               != config.systems.end();
    bool const want_rested = std::find(config.systems.begin(), config.systems.end(), SystemKind::Rested)
                             != config.systems.end();

    for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
        double const lambda = config.lambdas[li];
        PppConfig const ppp = config.ppp_for(lambda);
        std::optional<NetworkRealization> fixed;
        if (config.geometry == GeometryMode::Fixed) {
            fixed = fixed_realization(config, li);
        }
        for (std::size_t vi = 0; vi < config.horizons.size(); ++vi) {
            int const v = config.horizons[vi];
            LtiSystem const sys = config.plant.build(v);
            Vector const x0 = config.plant.initial_state(sys.state_dim());
            for (Protocol protocol : config.protocols) {
                for (std::size_t qi = 0; qi < config.q_grid.size(); ++qi) {
                    double const q = config.q_grid[qi];
                    std::vector<std::uint8_t> restless(n, 0);
                    std::vector<std::uint8_t> rested(n, 0);
                    parallel_for(n, config.threads, [&](std::size_t i) {
                        Engine rng = make_stream(config.seed, {kSweepStream, li, vi, protocol_tag(protocol), qi, i});
                        NetworkRealization const realization = fixed ? *fixed : sample_ppp(ppp, rng);
                        LinkSimulator const link(realization, config.channel);
                        BlockAcks const acks = link.simulate_block(protocol, q, config.T, rng);
                        SuccessOracle const oracle = [&](int t) { return acks.acks[static_cast<std::size_t>(t)] != 0; };
                        if (want_restless) {
                            restless[i] = run_block_restless(sys, config.T, acks.access, oracle, x0, x0, rng)
                                              .block_controllable;
                        }
                        if (want_rested) {
                            rested[i] = run_block_rested(sys, config.T, acks.access, oracle, x0, x0, rng)
                                            .block_controllable;
                        }
                    });
                    for (SystemKind system : config.systems) {
                        auto const& hits = system == SystemKind::Restless ? restless : rested;
                        long count = 0;
                        for (auto h : hits) {
                            count += h;
                        }
                        SweepResult row;
                        row.protocol = protocol;
                        row.system = system;
                        row.q = q;
                        row.lambda = lambda;
                        row.v = v;
                        row.n_samples = static_cast<long>(n);
                        row.estimate = static_cast<double>(count) / static_cast<double>(n);
                        row.half_width_95 = half_width(row.estimate, row.n_samples);
                        if (with_analytic && config.geometry == GeometryMode::PerBlock) {
                            auto const model = config.model_for(lambda);
                            auto const quad = config.quad_for(lambda);
                            row.analytic = system == SystemKind::Restless
                                               ? prob_block_controllable_restless(config.T, v, q, model, quad, protocol)
                                                     .value
                                               : prob_block_controllable_rested(config.T, v, q, model, quad, protocol)
                                                     .value;
                        }
                        out.push_back(row);
                    }
                }
            }
        }
    }
    return out;
}

MetaEmpirical empirical_meta_distribution(ExperimentConfig const& config, double lambda, int v, double q,
                                          double beta, Protocol protocol, std::uint64_t stream_tag)
{
    MetaEmpirical out;
    out.threshold = inverse_tail_threshold(config.T, v, q, beta, protocol);
    auto const n = static_cast<std::size_t>(config.num_realizations);
    out.n_samples = static_cast<long>(n);
    if (!out.threshold) {
        return out;
    }
    double const p_star = *out.threshold;
    PppConfig const ppp = config.ppp_for(lambda);
    std::vector<std::uint8_t> hit(n, 0);
    parallel_for(n, config.threads, [&](std::size_t i) {
        Engine rng = make_stream(config.seed, {kMetaStream, stream_tag, i});
        NetworkRealization const realization = sample_ppp(ppp, rng);
        double p = 0.0;
        if (protocol == Protocol::Block) {
            auto const active = draw_access_block(q, realization.size(), rng);
            std::vector<std::size_t> idx;
            for (std::size_t k = 0; k < active.size(); ++k) {
                if (active[k]) {
                    idx.push_back(k);
                }
            }
            p = cond_success_prob_block(realization, idx, config.channel);
        } else {
            p = cond_success_prob_classical(realization, q, config.channel);
        }
        hit[i] = p >= p_star ? 1 : 0;
    });
    long count = 0;
    for (auto h : hit) {
        count += h;
    }
    out.fraction = static_cast<double>(count) / static_cast<double>(n);
    out.half_width_95 = half_width(out.fraction, out.n_samples);
    return out;
}

std::vector<ComparisonRow> compare_analytic_empirical(ExperimentConfig const& config)
{
    config.validate();
    if (config.channel.pathloss_exp <= 2.0 && config.quad.infinite_plane) {
        throw ConfigError("infinite_plane", "comparison at alpha <= 2 needs the windowed integrals");
    }
    std::vector<ComparisonRow> rows;

    ExperimentConfig sweep_config = config;
    sweep_config.systems = {SystemKind::Restless};
    sweep_config.geometry = GeometryMode::PerBlock;
    for (auto const& r : estimate_block_controllability(sweep_config, true)) {
        ComparisonRow row;
        row.kind = "restless";
        row.protocol = r.protocol;
        row.q = r.q;
        row.lambda = r.lambda;
        row.v = r.v;
        row.empirical = r.estimate;
        row.half_width_95 = r.half_width_95;
        row.analytic = r.analytic.value_or(0.0);
        row.abs_diff = std::abs(row.empirical - row.analytic);
        row.tolerance = std::max(0.02, 3.0 * r.half_width_95);
        row.passes = row.abs_diff <= row.tolerance;
        rows.push_back(row);
    }

    std::uint64_t tag = 0;
    for (double lambda : config.lambdas) {
        for (int v : config.horizons) {
            for (Protocol protocol : config.protocols) {
                for (double q : config.meta_q) {
                    for (double beta : config.betas) {
                        MetaQuery query{v, beta, config.T, q, config.model_for(lambda)};
                        AnalyticValue const a = meta_distribution_rested(query, config.quad_for(lambda), protocol);
                        MetaEmpirical const e = empirical_meta_distribution(config, lambda, v, q, beta, protocol, tag++);
                        ComparisonRow row;
                        row.kind = "meta";
                        row.protocol = protocol;
                        row.q = q;
                        row.lambda = lambda;
                        row.v = v;
                        row.beta = beta;
                        row.empirical = e.fraction;
                        row.half_width_95 = e.half_width_95;
                        row.analytic = a.value;
                        row.analytic_error = a.abs_error;
                        row.abs_diff = std::abs(row.empirical - row.analytic);
                        row.tolerance = 0.02;
                        row.passes = row.abs_diff <= row.tolerance;
                        rows.push_back(row);
                    }
                }
            }
        }
    }
    return rows;
}

std::vector<RegretStudy> run_regret_study(ExperimentConfig const& config)
{
    config.validate();
    std::vector<RegretStudy> out;
    auto const runs = static_cast<std::size_t>(config.num_realizations);
    auto const k_count = static_cast<std::size_t>(config.K);
    int const D = static_cast<int>(config.arms.size());
    TsOptions options;
    options.protocol = config.protocols.front();
    options.T = config.T;
    options.K = config.K;
    options.snapshot_every = 0;
    options.reward = config.reward;

    for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
        double const lambda = config.lambdas[li];
        PppConfig const ppp = config.ppp_for(lambda);
        std::vector<std::vector<double>> curves(runs);
        std::vector<std::size_t> hits(runs, 0);
        parallel_for(runs, config.threads, [&](std::size_t r) {
            Engine rng = make_stream(config.seed, {kRegretStream, li, r});
            NetworkRealization const realization = sample_ppp(ppp, rng);
            TsRun run = run_ts(realization, config.arms, config.channel, options, rng);
            std::size_t const from = k_count > 1000 ? 1000 : 0;
            hits[r] = modal_arm(run.trace.chosen_arm, from, config.arms.size()) == run.oracle.index ? 1 : 0;
            curves[r] = std::move(run.trace.cumulative);
        });
        RegretStudy study;
        study.lambda = lambda;
        study.oracle_hits = hits;
        study.mean_cumulative.assign(k_count, 0.0);
        for (auto const& c : curves) {
            for (std::size_t k = 0; k < k_count; ++k) {
                study.mean_cumulative[k] += c[k];
            }
        }
        for (auto& m : study.mean_cumulative) {
            m /= static_cast<double>(runs);
        }
        study.envelope.assign(k_count, 0.0);
        for (std::size_t k = 0; k < k_count; ++k) {
            int const kk = static_cast<int>(k) + 1;
            study.envelope[k] = kk >= 2 ? regret_envelope_explicit(kk, config.T, D)
                                        : 4.0 * config.T * D;
            if (study.mean_cumulative[k] >= study.envelope[k]) {
                study.below_envelope = false;
            }
        }
        for (std::size_t k = 1000; 2 * k <= k_count; ++k) {
            double const base = study.mean_cumulative[k - 1];
            if (base > 0.0) {
                study.max_ratio = std::max(study.max_ratio, study.mean_cumulative[2 * k - 1] / base);
            }
        }
        out.push_back(std::move(study));
    }
    return out;
}

std::vector<TsOutcome> run_ts_experiment(ExperimentConfig const& config)
{
    config.validate();
    std::vector<TsOutcome> out;
    TsOptions options;
    options.protocol = config.protocols.front();
    options.T = config.T;
    options.K = config.K;
    options.snapshot_every = config.snapshot_every;
    options.reward = config.reward;
    for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
        Engine rng = make_stream(config.seed, {kTsStream, li});
        TsOutcome o;
        o.lambda = config.lambdas[li];
        o.realization = sample_ppp(config.ppp_for(o.lambda), rng);
        o.run = run_ts(o.realization, config.arms, config.channel, options, rng);
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<AnalyticRow> run_analytic_sweep(ExperimentConfig const& config)
{
    config.validate();
    std::vector<AnalyticRow> rows;
    for (double lambda : config.lambdas) {
        auto const model = config.model_for(lambda);
        auto const quad = config.quad_for(lambda);
        for (int v : config.horizons) {
            for (Protocol protocol : config.protocols) {
                for (double q : config.q_grid) {
                    auto const a = prob_block_controllable_restless(config.T, v, q, model, quad, protocol);
                    rows.push_back({protocol, q, lambda, config.T, v, std::nullopt, a.value, a.abs_error,
                                    a.precision_warning});
                }
                for (double q : config.meta_q) {
                    for (double beta : config.betas) {
                        auto const a = meta_distribution_rested({v, beta, config.T, q, model}, quad, protocol);
                        rows.push_back({protocol, q, lambda, config.T, v, beta, a.value, a.abs_error, false});
                    }
                }
            }
        }
    }
    return rows;
}

}  // namespace ccnet
