#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "ccnet/aloha.hpp"
#include "ccnet/errors.hpp"
#include "ccnet/random.hpp"

using namespace ccnet;

TEST_CASE("protocol names")
{
    CHECK(parse_protocol("block") == Protocol::Block);
    CHECK(parse_protocol("classical") == Protocol::Classical);
    CHECK(to_string(Protocol::Classical) == "classical");
    CHECK_THROWS(parse_protocol("slotted"));
}

TEST_CASE("policy validation")
{
    AlohaPolicy p{Protocol::Block, 1.5, {}};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {Protocol::Block, 0.5, {0.2, 0.1}};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {Protocol::Block, 0.5, {0.1, 0.2}};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("block access draws")
{
    Engine rng = make_stream(1, {});
    auto none = draw_access_block(0.0, 100, rng);
    CHECK(std::count(none.begin(), none.end(), 1) == 0);
    auto all = draw_access_block(1.0, 100, rng);
    CHECK(std::count(all.begin(), all.end(), 1) == 100);
    std::size_t const n = 100000;
    auto some = draw_access_block(0.3, n, rng);
    double const frac = static_cast<double>(std::count(some.begin(), some.end(), 1)) / n;
    CHECK(std::abs(frac - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("classical access draws")
{
    Engine rng = make_stream(2, {});
    auto none = draw_access_classical(0.0, 10, 20, rng);
    CHECK(std::count(none.cells.begin(), none.cells.end(), 1) == 0);
    auto all = draw_access_classical(1.0, 10, 20, rng);
    CHECK(std::count(all.cells.begin(), all.cells.end(), 1) == 200);

    // Active fractions of two slots are uncorrelated across draws.
    int const draws = 10000;
    std::size_t const nodes = 50;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int d = 0; d < draws; ++d) {
        auto g = draw_access_classical(0.4, nodes, 2, rng);
        double x = 0, y = 0;
        for (std::size_t k = 0; k < nodes; ++k) {
            x += g.at(k, 0);
            y += g.at(k, 1);
        }
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    double const n = draws;
    double const cov = sxy / n - (sx / n) * (sy / n);
    double const corr = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
    // |r| sqrt(n) is approximately standard normal; 2.576 is the two-sided 0.01 point.
    CHECK(std::abs(corr) * std::sqrt(n) < 2.576);
}
