#include "doctest.h"

#include <regex>
#include <string>

#include "ccnet/control.hpp"
#include "ccnet/errors.hpp"
#include "ccnet/random.hpp"

using namespace ccnet;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (auto const& r : rows) {
        Eigen::Index j = 0;
        for (double x : r) {
            m(i, j++) = x;
        }
        ++i;
    }
    return m;
}

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v;
}

std::vector<std::uint8_t> ones(int n) { return std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1); }

SuccessOracle pattern(std::vector<int> acks)
{
    return [acks = std::move(acks)](int t) { return acks[static_cast<std::size_t>(t) % acks.size()] != 0; };
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Engine& rng)
{
    std::normal_distribution<double> n01;
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = n01(rng);
        }
    }
    return m;
}

Matrix power(Matrix const& a, int k)
{
    Matrix r = Matrix::Identity(a.rows(), a.cols());
    for (int i = 0; i < k; ++i) {
        r = r * a;
    }
    return r;
}

}  // namespace

TEST_CASE("minimal polynomial degree")
{
    CHECK(minimal_poly_degree(Matrix::Identity(3, 3)) == 1);
    CHECK(minimal_poly_degree(mat({{1, 0}, {0, 2}})) == 2);
    Matrix j = mat({{0.5, 1, 0}, {0, 0.5, 1}, {0, 0, 0.5}});
    CHECK(minimal_poly_degree(j) == 3);
    // (J - 0.5 I)^3 vanishes while the square does not.
    Matrix const n = j - 0.5 * Matrix::Identity(3, 3);
    CHECK((n * n * n).norm() < 1e-15);
    CHECK((n * n).norm() > 0.5);
    CHECK(minimal_poly_degree(mat({{2, 0, 0}, {0, 2, 0}, {0, 0, 3}})) == 2);
    CHECK(minimal_poly_degree(Matrix::Zero(2, 2)) == 1);
}

TEST_CASE("pseudo inverse and range condition")
{
    Matrix b = mat({{1, 0}, {0, 1}, {0, 0}});
    Matrix bp = pseudo_inverse(b);
    CHECK((b * bp * b - b).norm() < 1e-12);
    CHECK(range_condition_holds(mat({{0.5, 0, 0}, {0, 0.2, 0}, {0, 0, 1}}), b));
    CHECK_FALSE(range_condition_holds(mat({{0.5, 0, 0}, {0, 0.2, 0}, {0, 0, 0.3}}), b));
}

TEST_CASE("input design")
{
    SUBCASE("identity plant, one step")
    {
        auto u = design_inputs(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 1, vec({1, 1}), Vector::Zero(2));
        REQUIRE(u.size() == 1);
        CHECK((u[0] - vec({1, 1})).norm() < 1e-12);
    }
    SUBCASE("double integrator")
    {
        Matrix a = mat({{1, 1}, {0, 1}});
        Matrix b = mat({{0}, {1}});
        auto u = design_inputs(a, b, 2, vec({1, 0}), Vector::Zero(2));
        REQUIRE(u.size() == 2);
        CHECK((a * b * u[0] + b * u[1] - vec({1, 0})).norm() < 1e-12);
    }
    SUBCASE("estimate already at target stays there")
    {
        LtiSystem sys(mat({{0.8, 0.1}, {0, 1.2}}), mat({{1, 0}, {0.5, 1}}), vec({1, -2}));
        Vector x = sys.x_des();
        for (auto const& u : sys.design_inputs(x)) {
            x = sys.a() * x + sys.b() * u;
        }
        CHECK((x - sys.x_des()).norm() < 1e-12);
    }
}

TEST_CASE("holding and feedback inputs")
{
    CHECK(LtiSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), vec({3, 4})).holding_input().norm() == 0.0);
    CHECK(LtiSystem(mat({{0.5, 0}, {0, 0.7}}), Matrix::Identity(2, 2), Vector::Zero(2)).holding_input().norm() == 0.0);

    LtiSystem sys(mat({{0.5, 0}, {0, 0.5}}), Matrix::Identity(2, 2), vec({2, 2}));
    CHECK((sys.holding_input() - vec({1, 1})).norm() < 1e-12);
    CHECK((sys.a() * sys.x_des() + sys.b() * sys.holding_input() - sys.x_des()).norm() < 1e-12);

    LtiSystem scalar(mat({{0.9}}), mat({{2}}), vec({10}));
    CHECK(scalar.feedback_input(vec({10}))(0) == doctest::Approx(0.5));
    CHECK(0.9 * 10 + 2 * scalar.feedback_input(vec({10}))(0) == doctest::Approx(10));
    CHECK(scalar.feedback_input(vec({0}))(0) == 0.0);
    CHECK(LtiSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), vec({1, 1})).feedback_input(vec({5, 6})).norm() ==
          0.0);
}

TEST_CASE("construction enforces its contract")
{
    CHECK_THROWS_AS(LtiSystem(mat({{1, 0}, {0, 2}}), Matrix::Identity(2, 2), vec({1, 1}), 1), InvalidArgument);
    CHECK_THROWS_AS(LtiSystem(mat({{0.5, 0}, {0, 0.3}}), mat({{1}, {0}}), vec({1, 1})), InvalidArgument);
    CHECK_THROWS_AS(LtiSystem(Matrix::Identity(2, 2), Matrix::Identity(3, 3), vec({1, 1})), InvalidArgument);
    CHECK_THROWS_AS(LtiSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), vec({1, 1}), 0, -1.0), InvalidArgument);
    CHECK(LtiSystem(mat({{1, 0}, {0, 2}}), Matrix::Identity(2, 2), vec({1, 1})).horizon() == 2);
}

TEST_CASE("propagation and estimate update")
{
    Engine rng = make_stream(1, {});
    LtiSystem id(Matrix::Identity(2, 2), Matrix::Identity(2, 2), vec({1, 1}));
    CHECK((id.propagate(Vector::Zero(2), vec({1, 1}), rng) - vec({1, 1})).norm() == 0.0);
    CHECK((id.update_estimate(vec({3, 4}), vec({1, 1}), false) - vec({3, 4})).norm() == 0.0);
    CHECK((id.update_estimate(vec({3, 4}), vec({1, 1}), true) - vec({4, 5})).norm() == 0.0);

    LtiSystem sys(mat({{0.5, 0}, {0, 0.5}}), Matrix::Identity(2, 2), vec({2, 2}));
    CHECK((sys.propagate(sys.x_des(), sys.holding_input(), rng) - sys.x_des()).norm() < 1e-12);

    SUBCASE("noise mean")
    {
        LtiSystem noisy(mat({{0.5, 0}, {0, 0.5}}), Matrix::Identity(2, 2), vec({2, 2}), 0, 0.1);
        Vector const x = vec({1, -1}), u = vec({0.3, 0.2});
        Vector const expected = noisy.a() * x + noisy.b() * u;
        Vector sum = Vector::Zero(2);
        int const n = 100000;
        for (int i = 0; i < n; ++i) {
            sum += noisy.propagate(x, u, rng);
        }
        CHECK(((sum / n) - expected).cwiseAbs().maxCoeff() < 3.0 * 0.1 / std::sqrt(n));
    }

    SUBCASE("block recursion equals the closed-form sum")
    {
        Matrix a = random_matrix(3, 3, rng) * 0.5;
        Matrix b = random_matrix(3, 2, rng);
        Vector xh0 = random_matrix(3, 1, rng);
        std::vector<Vector> us;
        std::vector<int> s;
        std::bernoulli_distribution coin(0.6);
        for (int t = 0; t < 8; ++t) {
            us.push_back(random_matrix(2, 1, rng));
            s.push_back(coin(rng));
        }
        Matrix const bb = b;
        Vector xh = xh0;
        for (int t = 0; t < 8; ++t) {
            xh = a * xh + (s[t] ? Vector(bb * us[t]) : Vector::Zero(3));
        }
        Vector closed = power(a, 8) * xh0;
        for (int tau = 0; tau < 8; ++tau) {
            closed += s[tau] * power(a, 8 - tau - 1) * bb * us[tau];
        }
        CHECK((xh - closed).norm() < 1e-10);
    }
}

TEST_CASE("block controllability predicates")
{
    std::vector<std::uint8_t> a{1, 1, 1}, b{1, 0, 1, 0, 1}, c{1, 0, 1, 0}, z(10, 0);
    CHECK(is_block_controllable_restless(a, 2));
    CHECK_FALSE(is_block_controllable_restless(b, 2));
    CHECK(is_block_controllable_rested(c, 2));
    for (int v = 1; v <= 5; ++v) {
        CHECK_FALSE(is_block_controllable_rested(z, v));
    }

    Engine rng = make_stream(5, {});
    std::bernoulli_distribution coin(0.55);
    std::uniform_int_distribution<int> vdist(1, 8);
    bool agree = true, implies = true;
    for (int trial = 0; trial < 100000; ++trial) {
        std::vector<std::uint8_t> s(20);
        std::string text;
        for (auto& x : s) {
            x = coin(rng);
            text.push_back(x ? '1' : '0');
        }
        int const v = vdist(rng);
        bool const scan = text.find(std::string(static_cast<std::size_t>(v), '1')) != std::string::npos;
        bool const restless = is_block_controllable_restless(s, v);
        agree = agree && scan == restless;
        implies = implies && (!restless || is_block_controllable_rested(s, v));
    }
    CHECK(agree);
    CHECK(implies);
}

TEST_CASE("restless block step-through")
{
    Engine rng = make_stream(1, {});
    LtiSystem sys(mat({{0.9, 0}, {0, 1.1}}), Matrix::Identity(2, 2), vec({1, 1}), 2);
    Vector const x0 = Vector::Zero(2);

    SUBCASE("all successes reach and hold the target")
    {
        auto tr = run_block_restless(sys, 20, ones(20), pattern({1}), x0, x0, rng);
        CHECK(tr.block_controllable);
        CHECK((tr.states.back() - sys.x_des()).norm() < 1e-9);
    }
    SUBCASE("idle block")
    {
        std::vector<std::uint8_t> idle(5, 0);
        Vector const x1 = vec({1, 2});
        auto tr = run_block_restless(sys, 5, idle, pattern({1}), x1, x1, rng);
        CHECK_FALSE(tr.block_controllable);
        CHECK(tr.success_count == 0);
        Vector x = x1;
        for (int t = 0; t < 5; ++t) {
            x = sys.a() * x;
        }
        CHECK((tr.states.back() - x).norm() < 1e-12);
    }
    SUBCASE("pattern 1,1,0,1,1 with v = 2")
    {
        auto tr = run_block_restless(sys, 5, ones(5), pattern({1, 1, 0, 1, 1}), x0, x0, rng);
        CHECK(tr.block_controllable);
        CHECK(tr.controllable_slot == 1);
        CHECK(tr.redesign_count == 1);
        CHECK(tr.sent_index == std::vector<int>{0, 1, kDummySlot, kDummySlot, kDummySlot});
        CHECK((tr.states.back() - sys.x_des()).norm() < 1e-9);
    }
    SUBCASE("a failure mid-burst forces a redesign")
    {
        auto tr = run_block_restless(sys, 6, ones(6), pattern({1, 0, 1, 1, 1, 1}), x0, x0, rng);
        CHECK(tr.redesign_count == 2);
        CHECK(tr.sent_index[0] == 0);
        CHECK(tr.sent_index[1] == 1);
        CHECK(tr.sent_index[2] == 0);
        CHECK((tr.states.back() - sys.x_des()).norm() < 1e-9);
    }
}

TEST_CASE("rested block step-through")
{
    Engine rng = make_stream(2, {});
    LtiSystem sys(mat({{0.9, 0}, {0, 1.1}}), Matrix::Identity(2, 2), vec({1, 1}), 2);
    Vector const x0 = vec({0.3, -0.2});

    SUBCASE("alternating acknowledgments retransmit the same index")
    {
        auto tr = run_block_rested(sys, 6, ones(6), pattern({0, 1}), x0, x0, rng);
        CHECK(tr.sent_index == std::vector<int>{0, 0, 1, 1, kDummySlot, kDummySlot});
        CHECK(tr.block_controllable);
        CHECK((tr.states.back() - sys.x_des()).norm() < 1e-9);
    }
    SUBCASE("failures freeze state and estimate")
    {
        auto tr = run_block_rested(sys, 6, ones(6), pattern({0, 0, 1, 0, 1, 0}), x0, x0, rng);
        for (int t = 0; t < 6; ++t) {
            if (!tr.acks[static_cast<std::size_t>(t)]) {
                CHECK((tr.estimates[t + 1] - tr.estimates[t]).norm() == 0.0);
                CHECK((tr.states[t + 1] - tr.states[t]).norm() < 1e-12);
            }
        }
        CHECK((tr.states.back() - sys.x_des()).norm() < 1e-9);
    }
}

TEST_CASE("property suite over random systems")
{
    Engine rng = make_stream(99, {});
    std::uniform_int_distribution<int> dim(1, 3);
    std::bernoulli_distribution coin(0.6);
    std::bernoulli_distribution access_coin(0.8);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Matrix a, b;
        Vector x_des, x0;
        if (trial % 2 == 0) {
            // Controllable family: B has full row rank.
            Eigen::Index const n = dim(rng);
            Eigen::Index const m = std::uniform_int_distribution<Eigen::Index>(n, 3)(rng);
            a = random_matrix(n, n, rng) * 0.6;
            b = random_matrix(n, m, rng);
            x_des = random_matrix(n, 1, rng);
            x0 = random_matrix(n, 1, rng);
        } else {
            // A = I - B M keeps col(I - A) inside col(B); targets are drawn in col(B).
            Eigen::Index const n = std::uniform_int_distribution<Eigen::Index>(2, 4)(rng);
            Eigen::Index const m = std::uniform_int_distribution<Eigen::Index>(1, std::min<Eigen::Index>(n - 1, 3))(rng);
            b = random_matrix(n, m, rng);
            a = Matrix::Identity(n, n) - b * random_matrix(m, n, rng) * 0.3;
            x_des = b * random_matrix(m, 1, rng);
            x0 = b * random_matrix(m, 1, rng);
        }
        LtiSystem sys(a, b, x_des);
        int const T = 3 * sys.horizon() + 4;
        std::vector<std::uint8_t> access(static_cast<std::size_t>(T));
        std::vector<int> acks(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            access[t] = access_coin(rng);
            acks[t] = coin(rng);
        }
        double const scale = std::max(1.0, x_des.norm());
        for (bool restless : {true, false}) {
            auto tr = restless ? run_block_restless(sys, T, access, pattern(acks), x0, x0, rng)
                               : run_block_rested(sys, T, access, pattern(acks), x0, x0, rng);
            for (std::size_t t = 0; t < tr.states.size(); ++t) {
                REQUIRE((tr.states[t] - tr.estimates[t]).norm() <= 1e-9 * scale * 10);
            }
            if (tr.block_controllable) {
                for (std::size_t t = static_cast<std::size_t>(tr.controllable_slot) + 1; t < tr.states.size(); ++t) {
                    REQUIRE((tr.states[t] - x_des).norm() <= 1e-9 * scale * 10);
                }
                ++checked;
            }
            if (!restless) {
                for (int t = 0; t < T; ++t) {
                    if (!tr.acks[static_cast<std::size_t>(t)]) {
                        REQUIRE((tr.estimates[t + 1] - tr.estimates[t]).norm() == 0.0);
                    }
                }
            }
        }
    }
    CHECK(checked > 500);
}
