#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "ccnet/analytics.hpp"
#include "ccnet/errors.hpp"
#include "ccnet/geometry.hpp"
#include "ccnet/montecarlo.hpp"
#include "ccnet/random.hpp"

using namespace ccnet;

namespace {

double brute_run_ccdf(int T, int v, double p)
{
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << T); ++mask) {
        int run = 0, best = 0, k = 0;
        for (int t = 0; t < T; ++t) {
            if (mask >> t & 1u) {
                ++k;
                best = std::max(best, ++run);
            } else {
                run = 0;
            }
        }
        if (best >= v) {
            total += std::pow(p, k) * std::pow(1 - p, T - k);
        }
    }
    return total;
}

NetworkModel model_at(double lambda, double alpha = 4.0)
{
    NetworkModel m;
    m.lambda = lambda;
    m.typical_distance = 10.0;
    m.channel = default_channel();
    m.channel.pathloss_exp = alpha;
    return m;
}

QuadratureSpec quad_at(double L)
{
    QuadratureSpec q;
    q.outer_limit = L;
    return q;
}

}  // namespace

TEST_CASE("longest-run tail")
{
    CHECK(run_ccdf_demoivre(3, 2, 0.5) == doctest::Approx(0.375).epsilon(1e-15));
    for (double p : {0.1, 0.37, 0.8}) {
        CHECK(run_ccdf_demoivre(15, 1, p) == doctest::Approx(1 - std::pow(1 - p, 15)).epsilon(1e-13));
    }
    for (int v = 1; v <= 20; ++v) {
        CHECK(run_ccdf_demoivre(20, v, 1.0) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(run_ccdf_demoivre(20, 0, 0.3), InvalidArgument);
    CHECK_THROWS_AS(run_ccdf_demoivre(20, 21, 0.9), InvalidArgument);
    for (int v = 1; v <= 10; ++v) {
        CHECK(std::abs(run_ccdf_demoivre(10, v, 0.45) - brute_run_ccdf(10, v, 0.45)) < 1e-12);
    }
}

TEST_CASE("binomial tail")
{
    CHECK(binomial_tail(20, 0, 0.4) == 1.0);
    CHECK(binomial_tail(20, 3, 0.0) == 0.0);
    double direct = 0.0;
    for (int k = 4; k <= 20; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) {
            c = c * (20 - i) / (i + 1);
        }
        direct += c * std::pow(0.3, k) * std::pow(0.7, 20 - k);
    }
    CHECK(binomial_tail(20, 4, 0.3) == doctest::Approx(direct).epsilon(1e-14));

    Engine rng = make_stream(3, {});
    std::binomial_distribution<int> bin(20, 0.3);
    int const n = 1000000;
    long hits = 0;
    for (int i = 0; i < n; ++i) {
        hits += bin(rng) >= 4;
    }
    CHECK(std::abs(static_cast<double>(hits) / n - direct) <= 3.0 * std::sqrt(direct * (1 - direct) / n));
}

TEST_CASE("interference exponent")
{
    QuadratureSpec quad = quad_at(500.0);
    CHECK(interference_log_integral(2.5, 1.0, model_at(0.0), quad, Protocol::Block) == 0.0);
    CHECK(interference_log_integral(0.0, 0.6, model_at(1e-3), quad, Protocol::Classical) == 0.0);
    CHECK(std::abs(interference_log_integral(std::complex<double>(0, 0), 0.6, model_at(1e-3), quad, Protocol::Block)) ==
          0.0);

    SUBCASE("PGFL Monte Carlo")
    {
        NetworkModel model = model_at(1e-4);
        model.channel.noise_power = 0.0;
        double const analytic = std::exp(interference_log_integral(1.0, 1.0, model, quad, Protocol::Block));
        PppConfig cfg{1e-4, 500.0, 10.0};
        double sum = 0.0;
        int const n = 100000;
        for (int i = 0; i < n; ++i) {
            Engine rng = make_stream(31, {static_cast<std::uint64_t>(i)});
            double prod = 1.0;
            for (double r : sample_ppp(cfg, rng).interferer_distances) {
                prod *= 1e-4 / (1e-4 + std::pow(r, -4.0));
            }
            sum += prod;
        }
        CHECK(sum / n == doctest::Approx(analytic).epsilon(0.02));
    }

    SUBCASE("an impossible budget raises QuadratureFailure")
    {
        QuadratureSpec tight = quad;
        tight.max_subdivisions = 1;
        tight.abs_tol = 1e-300;
        tight.rel_tol = 1e-300;
        CHECK_THROWS_AS(interference_log_integral(1.0, 1.0, model_at(1e-3), tight, Protocol::Block), QuadratureFailure);
    }
}

TEST_CASE("moments")
{
    QuadratureSpec quad = quad_at(500.0);
    NetworkModel empty = model_at(0.0);
    for (int l = 1; l <= 4; ++l) {
        CHECK(moment_zeta(l, 0.5, empty, quad, Protocol::Block) ==
              doctest::Approx(std::exp(-l * empty.noise_exponent())).epsilon(1e-12));
    }
    NetworkModel model = model_at(5e-4);
    for (Protocol proto : {Protocol::Block, Protocol::Classical}) {
        double prev = 1.0;
        for (int l = 1; l <= 6; ++l) {
            double const z = moment_zeta(l, 0.7, model, quad, proto);
            CHECK(z <= prev);
            CHECK(z >= 0.0);
            prev = z;
        }
    }

    SUBCASE("first moment against thinned realizations")
    {
        double const q = 0.5;
        PppConfig cfg{5e-4, 200.0, 10.0};
        QuadratureSpec q200 = quad_at(200.0);
        double const analytic = moment_zeta(1, q, model, q200, Protocol::Block);
        double sum = 0.0;
        int const n = 100000;
        std::bernoulli_distribution coin(q);
        for (int i = 0; i < n; ++i) {
            Engine rng = make_stream(17, {static_cast<std::uint64_t>(i)});
            auto r = sample_ppp(cfg, rng);
            std::vector<std::size_t> active;
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (coin(rng)) {
                    active.push_back(k);
                }
            }
            sum += cond_success_prob_block(r, active, model.channel);
        }
        CHECK(sum / n == doctest::Approx(analytic).epsilon(0.02));
    }
}

TEST_CASE("closed-form controllability")
{
    QuadratureSpec quad = quad_at(500.0);
    NetworkModel empty = model_at(0.0);
    double const p0 = std::exp(-empty.noise_exponent());
    for (double q : {0.2, 0.6, 1.0}) {
        CHECK(prob_block_controllable_restless(20, 4, q, empty, quad, Protocol::Block).value ==
              doctest::Approx(q * run_ccdf_demoivre(20, 4, p0)).epsilon(1e-9));
        CHECK(prob_block_controllable_rested(20, 4, q, empty, quad, Protocol::Block).value ==
              doctest::Approx(q * binomial_tail(20, 4, p0)).epsilon(1e-6));
    }
    NetworkModel model = model_at(1e-3);
    CHECK(prob_block_controllable_restless(20, 4, 0.0, model, quad, Protocol::Block).value == 0.0);
    auto const r = prob_block_controllable_rested(20, 4, 0.8, model, quad, Protocol::Block);
    CHECK(r.cancellation_ratio > 1e6);
    CHECK(r.precision_warning);
}

TEST_CASE("inverse tail threshold")
{
    CHECK_FALSE(inverse_tail_threshold(20, 4, 0.5, 0.9, Protocol::Block).has_value());
    auto small = inverse_tail_threshold(20, 4, 1.0, 1e-12, Protocol::Block);
    REQUIRE(small.has_value());
    CHECK(*small < 0.01);
    auto p = inverse_tail_threshold(20, 4, 1.0, 0.9, Protocol::Block);
    REQUIRE(p.has_value());
    CHECK(binomial_tail(20, 4, *p) >= 0.9);
    CHECK(binomial_tail(20, 4, *p) <= 0.9 + 1e-9);
    CHECK(binomial_tail(20, 4, *p - 1e-9) < 0.9);
}

TEST_CASE("characteristic-function inversion of a Gaussian")
{
    double const mu = -0.7, sigma = 0.4;
    auto log_cf = [&](double s) { return std::complex<double>(-0.5 * sigma * sigma * s * s, mu * s); };
    for (double x : {-1.5, -0.9, -0.7, -0.2, 0.5}) {
        double const exact = 0.5 * std::erfc((x - mu) / (sigma * std::sqrt(2.0)));
        auto const got = ccdf_from_cf(log_cf, x, mu, InversionOptions{});
        CHECK(got.value == doctest::Approx(exact).epsilon(1e-5));
    }
}

TEST_CASE("meta distribution")
{
    QuadratureSpec quad = quad_at(500.0);
    NetworkModel empty = model_at(0.0);
    double const p0 = std::exp(-empty.noise_exponent());
    for (double beta : {0.5, 0.9, 0.99}) {
        MetaQuery query{4, beta, 20, 1.0, empty};
        auto const thr = inverse_tail_threshold(20, 4, 1.0, beta, Protocol::Block);
        double const expected = thr && p0 >= *thr ? 1.0 : 0.0;
        CHECK(meta_distribution_rested(query, quad, Protocol::Block).value == expected);
    }

    NetworkModel model = model_at(1e-3);
    double prev = 1.0;
    for (double beta : {0.3, 0.5, 0.7, 0.9}) {
        MetaQuery query{4, beta, 20, 1.0, model};
        double const m = meta_distribution_rested(query, quad, Protocol::Block).value;
        CHECK(m >= 0.0);
        CHECK(m <= prev + 1e-6);
        prev = m;
    }

    SUBCASE("classical against the empirical CCDF")
    {
        ExperimentConfig cfg;
        cfg.lambdas = {1e-4};
        cfg.channel = model_at(1e-4).channel;
        cfg.num_realizations = 10000;
        cfg.seed = 8;
        NetworkModel m4 = cfg.model_for(1e-4);
        QuadratureSpec q4 = cfg.quad_for(1e-4);
        std::uint64_t tag = 0;
        for (double beta : {0.5, 0.7, 0.9}) {
            MetaQuery query{4, beta, 20, 0.7, m4};
            double const analytic = meta_distribution_rested(query, q4, Protocol::Classical).value;
            double const empirical =
                empirical_meta_distribution(cfg, 1e-4, 4, 0.7, beta, Protocol::Classical, tag++).fraction;
            CHECK(std::abs(analytic - empirical) <= 0.02);
        }
    }
}
