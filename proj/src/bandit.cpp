#include "ccnet/bandit.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "ccnet/errors.hpp"
#include "ccnet/link_sim.hpp"

namespace ccnet {
namespace {

void check_arms(std::span<double const> arms)
{
    if (arms.empty()) {
        throw InvalidArgument("arm set must not be empty");
    }
    AlohaPolicy policy{Protocol::Block, arms.front(), {arms.begin(), arms.end()}};
    policy.validate();
}

struct Point
{
    double x;
    double y;
};

// Planar layout for the network-average reward: transmitters at the sampled
// distances with uniform bearings, each receiver r0 away in a uniform direction.
// Index 0 is the typical pair (receiver at the origin).
class Layout
{
  public:
    Layout(NetworkRealization const& realization, ChannelParams const& channel, Engine& rng)
        : alpha_(channel.pathloss_exp), threshold_(channel.sinr_threshold),
          noise_(channel.noise_power / (channel.tx_power * channel.pathloss_const))
    {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        double const r0 = realization.typical_distance;
        tx_.push_back({r0, 0.0});
        rx_.push_back({0.0, 0.0});
        for (double r : realization.interferer_distances) {
            double const th = angle(rng);
            double const ph = angle(rng);
            Point const t{r * std::cos(th), r * std::sin(th)};
            tx_.push_back(t);
            rx_.push_back({t.x + r0 * std::cos(ph), t.y + r0 * std::sin(ph)});
        }
        signal_ = std::pow(r0, -alpha_);
    }

    std::size_t size() const { return tx_.size(); }

    // Successful links among `active`, as a count.
    int successes(std::vector<std::uint8_t> const& active, Engine& rng) const
    {
        std::exponential_distribution<double> exp1(1.0);
        int ok = 0;
        for (std::size_t j = 0; j < tx_.size(); ++j) {
            if (!active[j]) {
                continue;
            }
            double interference = noise_;
            for (std::size_t k = 0; k < tx_.size(); ++k) {
                if (k == j || !active[k]) {
                    continue;
                }
                double const dx = tx_[k].x - rx_[j].x;
                double const dy = tx_[k].y - rx_[j].y;
                double const d2 = std::max(dx * dx + dy * dy, 1e-12);
                interference += exp1(rng) * std::pow(d2, -0.5 * alpha_);
            }
            ok += (exp1(rng) * signal_ > threshold_ * interference) ? 1 : 0;
        }
        return ok;
    }

  private:
    std::vector<Point> tx_;
    std::vector<Point> rx_;
    double alpha_;
    double threshold_;
    double noise_;
    double signal_ = 1.0;
};

// Mean per-pair successes over a block, as a real number in [0, T].
double network_average_reward(Layout const& layout, Protocol protocol, double q, int T, Engine& rng)
{
    std::size_t const n = layout.size();
    double total = 0.0;
    if (protocol == Protocol::Block) {
        auto const active = draw_access_block(q, n, rng);
        for (int t = 0; t < T; ++t) {
            total += layout.successes(active, rng);
        }
    } else {
        for (int t = 0; t < T; ++t) {
            total += layout.successes(draw_access_block(q, n, rng), rng);
        }
    }
    return total / static_cast<double>(n);
}

}  // namespace

void to_json(nlohmann::json& j, ArmPosterior const& p) { j = nlohmann::json{{"a", p.a}, {"b", p.b}}; }

double sample_beta(double a, double b, Engine& rng)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw InvalidArgument("sample_beta: a and b must be > 0");
    }
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    for (;;) {
        double const x = ga(rng);
        double const y = gb(rng);
        if (x + y > 0.0) {
            return x / (x + y);
        }
    }
}

std::size_t select_arm(std::span<ArmPosterior const> posteriors, Engine& rng)
{
    if (posteriors.empty()) {
        throw InvalidArgument("select_arm: need at least one arm");
    }
    std::size_t best = 0;
    double best_theta = -1.0;
    for (std::size_t d = 0; d < posteriors.size(); ++d) {
        double const theta = sample_beta(posteriors[d].a, posteriors[d].b, rng);
        if (theta > best_theta) {
            best_theta = theta;
            best = d;
        }
    }
    return best;
}

ArmPosterior batch_update(ArmPosterior posterior, int block_successes, int T)
{
    if (block_successes < 0 || block_successes > T) {
        throw InvalidArgument("batch_update: successes must lie in [0, T]");
    }
    posterior.a += block_successes;
    posterior.b += T - block_successes;
    return posterior;
}

OracleArm oracle_arm(NetworkRealization const& realization, std::span<double const> arms,
                     ChannelParams const& channel, int T)
{
    check_arms(arms);
    OracleArm out;
    out.mu.reserve(arms.size());
    for (std::size_t d = 0; d < arms.size(); ++d) {
        double const q = arms[d];
        double const mu = T * q * cond_success_prob_classical(realization, q, channel);
        out.mu.push_back(mu);
        if (d == 0 || mu > out.mu_star) {
            out.mu_star = mu;
            out.index = d;
        }
    }
    return out;
}

TsRun run_ts(NetworkRealization const& realization, std::span<double const> arms, ChannelParams const& channel,
             TsOptions const& options, Engine& rng)
{
    check_arms(arms);
    if (options.K < 1 || options.T < 1) {
        throw InvalidArgument("run_ts: K and T must be >= 1");
    }
    TsRun run;
    run.oracle = oracle_arm(realization, arms, channel, options.T);
    run.posteriors.assign(arms.size(), ArmPosterior{});
    auto& tr = run.trace;
    tr.oracle_arm_index = run.oracle.index;
    tr.arm_pull_counts.assign(arms.size(), 0);
    auto const k_count = static_cast<std::size_t>(options.K);
    tr.per_block_gap.reserve(k_count);
    tr.cumulative.reserve(k_count);
    tr.chosen_arm.reserve(k_count);
    tr.block_reward.reserve(k_count);

    LinkSimulator const link(realization, channel);
    std::unique_ptr<Layout> layout;
    if (options.reward == RewardMode::NetworkAverage) {
        layout = std::make_unique<Layout>(realization, channel, rng);
    }

    double cumulative = 0.0;
    for (int k = 0; k < options.K; ++k) {
        std::size_t const d = select_arm(run.posteriors, rng);
        double const q = arms[d];
        double reward = 0.0;
        if (layout) {
            reward = network_average_reward(*layout, options.protocol, q, options.T, rng);
            run.posteriors[d].a += reward;
            run.posteriors[d].b += options.T - reward;
        } else {
            // An idle typical block yields zero successes over T trials.
            int const successes = link.simulate_block(options.protocol, q, options.T, rng).successes;
            reward = successes;
            run.posteriors[d] = batch_update(run.posteriors[d], successes, options.T);
        }
        double const gap = std::max(0.0, run.oracle.mu_star - run.oracle.mu[d]);
        cumulative += gap;
        tr.per_block_gap.push_back(gap);
        tr.cumulative.push_back(cumulative);
        tr.chosen_arm.push_back(d);
        tr.block_reward.push_back(reward);
        ++tr.arm_pull_counts[d];
        if (options.snapshot_every > 0 && (k + 1) % options.snapshot_every == 0) {
            run.snapshots.push_back({k + 1, run.posteriors});
        }
    }
    return run;
}

double regret_envelope(int K, int T, int D, double C)
{
    if (K < 2 || T < 1 || D < 1) {
        throw InvalidArgument("regret_envelope: need K >= 2, T >= 1, D >= 1");
    }
    return C * std::sqrt(static_cast<double>(T) * K * D * std::log(static_cast<double>(K)));
}

double regret_envelope_explicit(int K, int T, int D)
{
    if (K < 2 || T < 1 || D < 1) {
        throw InvalidArgument("regret_envelope_explicit: need K >= 2, T >= 1, D >= 1");
    }
    return std::sqrt(64.0 * K * D * std::log(static_cast<double>(K))) + 4.0 * T * D;
}

std::size_t modal_arm(std::span<std::size_t const> chosen, std::size_t from, std::size_t num_arms)
{
    std::vector<std::size_t> counts(num_arms, 0);
    for (std::size_t k = from; k < chosen.size(); ++k) {
        ++counts.at(chosen[k]);
    }
    std::size_t best = 0;
    for (std::size_t d = 1; d < num_arms; ++d) {
        if (counts[d] > counts[best]) {
            best = d;
        }
    }
    return best;
}

}  // namespace ccnet
