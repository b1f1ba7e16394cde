#include "doctest.h"

#include <cmath>

#include "ccnet/config.hpp"
#include "ccnet/errors.hpp"
#include "ccnet/montecarlo.hpp"

using namespace ccnet;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.lambdas = {5e-3};
    c.q_grid = {0.0, 0.3, 0.7, 1.0};
    c.num_realizations = 2000;
    c.seed = 12;
    return c;
}

SweepResult const& find(std::vector<SweepResult> const& rows, Protocol p, SystemKind s, double q)
{
    for (auto const& r : rows) {
        if (r.protocol == p && r.system == s && r.q == q) {
            return r;
        }
    }
    throw std::runtime_error("row not found");
}

}  // namespace

TEST_CASE("validation names the offending key")
{
    ExperimentConfig c = small_config();
    c.q_grid = {1.5};
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (ConfigError const& e) {
        CHECK(e.key() == "q_grid");
    }
    c = small_config();
    c.T = 2;
    c.horizons = {4};
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("sweep orderings")
{
    auto const rows = estimate_block_controllability(small_config());
    CHECK(rows.size() == 16);
    for (Protocol p : {Protocol::Block, Protocol::Classical}) {
        for (SystemKind s : {SystemKind::Restless, SystemKind::Rested}) {
            CHECK(find(rows, p, s, 0.0).estimate == 0.0);
        }
        for (double q : {0.3, 0.7, 1.0}) {
            auto const& rl = find(rows, p, SystemKind::Restless, q);
            auto const& rd = find(rows, p, SystemKind::Rested, q);
            CHECK(rl.estimate <= rd.estimate);
        }
    }
}

TEST_CASE("results do not depend on the thread count")
{
    ExperimentConfig c = small_config();
    c.num_realizations = 300;
    c.threads = 1;
    auto const a = estimate_block_controllability(c);
    c.threads = 4;
    auto const b = estimate_block_controllability(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].estimate == b[i].estimate);
    }
}

TEST_CASE("zero density agrees with the closed form")
{
    ExperimentConfig c = small_config();
    c.lambdas = {0.0};
    c.window_radius = 100.0;
    c.num_realizations = 20000;
    c.q_grid = {0.4, 1.0};
    auto const rows = compare_analytic_empirical(c);
    for (auto const& r : rows) {
        if (r.kind == "restless") {
            CHECK(r.passes);
        }
    }
}

TEST_CASE("fixed geometry shares one realization")
{
    ExperimentConfig c = small_config();
    c.geometry = GeometryMode::Fixed;
    auto const r1 = fixed_realization(c, 0);
    auto const r2 = fixed_realization(c, 0);
    CHECK(r1.interferer_distances == r2.interferer_distances);
    auto const rows = estimate_block_controllability(c, true);
    for (auto const& r : rows) {
        CHECK_FALSE(r.analytic.has_value());
    }
}

TEST_CASE("regret study shape")
{
    ExperimentConfig c = small_config();
    c.lambdas = {5e-4};
    c.channel.pathloss_exp = 4.0;
    c.K = 200;
    c.num_realizations = 3;
    auto const studies = run_regret_study(c);
    REQUIRE(studies.size() == 1);
    CHECK(studies[0].mean_cumulative.size() == 200);
    CHECK(studies[0].envelope.size() == 200);
    CHECK(studies[0].oracle_hits.size() == 3);
}

TEST_CASE("single arm gives a flat zero regret curve")
{
    ExperimentConfig c = small_config();
    c.lambdas = {5e-4};
    c.arms = {0.5};
    c.K = 100;
    c.num_realizations = 2;
    auto const studies = run_regret_study(c);
    for (double r : studies[0].mean_cumulative) {
        CHECK(r == 0.0);
    }
}
