#include "ccnet/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ccnet/analytics.hpp"
#include "ccnet/bandit.hpp"
#include "ccnet/control.hpp"

namespace ccnet {
namespace {

double brute_run_ccdf(int T, int v, double p)
{
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << T); ++mask) {
        int run = 0, best = 0, ones = 0;
        for (int t = 0; t < T; ++t) {
            if (mask & (1u << t)) {
                ++ones;
                best = std::max(best, ++run);
            } else {
                run = 0;
            }
        }
        if (best >= v) {
            total += std::pow(p, ones) * std::pow(1.0 - p, T - ones);
        }
    }
    return total;
}

double simpson(std::function<double(double)> const& f, double a, double b, int n)
{
    double const h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

}  // namespace

int run_selftest(std::ostream& out)
{
    int failures = 0;
    auto check = [&](std::string const& name, bool ok, double detail) {
        out << (ok ? "ok   " : "FAIL ") << name << "  (" << detail << ")\n";
        failures += ok ? 0 : 1;
    };

    {
        double worst = 0.0;
        for (int v = 1; v <= 6; ++v) {
            for (double p : {0.1, 0.5, 0.9}) {
                worst = std::max(worst, std::abs(run_ccdf_demoivre(12, v, p) - brute_run_ccdf(12, v, p)));
            }
        }
        check("longest-run tail vs enumeration", worst < 1e-12, worst);
    }
    {
        double worst = 0.0;
        for (int v = 0; v <= 12; ++v) {
            double direct = 0.0;
            for (int k = v; k <= 12; ++k) {
                direct += std::exp(std::lgamma(13.0) - std::lgamma(k + 1.0) - std::lgamma(13.0 - k)) *
                          std::pow(0.3, k) * std::pow(0.7, 12 - k);
            }
            worst = std::max(worst, std::abs(binomial_tail(12, v, 0.3) - direct));
        }
        check("binomial tail vs direct sum", worst < 1e-13, worst);
    }
    {
        NetworkModel model;
        model.lambda = 1e-3;
        model.typical_distance = 10.0;
        model.channel = default_channel();
        model.channel.pathloss_exp = 4.0;
        QuadratureSpec quad;
        quad.outer_limit = 200.0;
        double const r0 = model.typical_distance;
        double const g = model.channel.sinr_threshold;
        for (Protocol proto : {Protocol::Block, Protocol::Classical}) {
            double const q = 0.6;
            double const w = 3.0;
            auto integrand = [&](double z) {
                double const f = z <= 0.0 ? 0.0 : 1.0 / (1.0 + g * std::pow(r0 / z, 4.0));
                double const base = proto == Protocol::Block ? f : q * f + 1.0 - q;
                return (1.0 - std::pow(base, w)) * z;
            };
            double const weight = proto == Protocol::Block ? q : 1.0;
            double const ref = -2.0 * std::numbers::pi * weight * model.lambda *
                               (simpson(integrand, 0.0, 40.0, 40000) + simpson(integrand, 40.0, 200.0, 20000));
            double const got = interference_log_integral(w, q, model, quad, proto);
            check("interference exponent (" + to_string(proto) + ") vs Simpson", std::abs(got - ref) < 1e-8,
                  std::abs(got - ref));
        }
    }
    {
        LtiSystem sys = default_plant(4);
        Vector x = Vector::Zero(sys.state_dim());
        for (Vector const& u : sys.design_inputs(x)) {
            x = sys.a() * x + sys.b() * u;
        }
        double const err = (x - sys.x_des()).norm();
        check("input plan reaches target in v steps", err < 1e-9, err);
        Vector const fixed = sys.a() * sys.x_des() + sys.b() * sys.holding_input() - sys.x_des();
        check("holding input keeps target fixed", fixed.norm() < 1e-9, fixed.norm());
    }
    {
        ArmPosterior p = batch_update(ArmPosterior{}, 7, 20);
        check("batch posterior update", p.a == 8.0 && p.b == 14.0, p.a);
        double const env = regret_envelope_explicit(100, 20, 10);
        double const ref = std::sqrt(64.0 * 100 * 10 * std::log(100.0)) + 4.0 * 20 * 10;
        check("regret envelope formula", std::abs(env - ref) < 1e-9, env);
    }
    out << (failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
    return failures;
}

}  // namespace ccnet
