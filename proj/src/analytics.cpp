#include "ccnet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ccnet/errors.hpp"
#include "ccnet/quadrature.hpp"

namespace ccnet {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

template <class V>
struct Integral
{
    V value{};
    double error = 0.0;
};

// 1 - exp(u) without cancellation for small |u|.
double one_minus_exp(double u) { return -std::expm1(u); }

cplx one_minus_exp(cplx u)
{
    if (std::abs(u) < 1e-5) {
        return -(u * (1.0 + u * (0.5 + u * (1.0 / 6.0 + u / 24.0))));
    }
    return 1.0 - std::exp(u);
}

long double binomial_ld(int n, int k)
{
    if (k < 0 || k > n) {
        return 0.0L;
    }
    k = std::min(k, n - k);
    long double c = 1.0L;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    }
    return c;
}

// Radial integrals of the typical-link interference field.
class Field
{
  public:
    Field(double q, NetworkModel const& model, QuadratureSpec const& quad, Protocol protocol)
        : q_(q), quad_(quad), protocol_(protocol)
    {
        r0_ = model.typical_distance;
        alpha_ = model.channel.pathloss_exp;
        gamma_ = model.channel.sinr_threshold;
        a_ = 2.0 / alpha_;
        lambda_ = model.lambda;
        weight_ = protocol == Protocol::Block ? q : 1.0;
        if (quad.infinite_plane && alpha_ <= 2.0) {
            throw InvalidArgument("infinite-plane integration requires alpha > 2");
        }
    }

    // Scale turning an integral of (...) z dz into the PGFL exponent.
    double scale() const { return 2.0 * kPi * weight_ * lambda_; }

    bool trivial() const { return scale() == 0.0; }

    // log of the per-interferer factor whose expectation enters the PGFL:
    // f (block) or q f + 1 - q (classical).
    double log_base(double z) const
    {
        double const x = gamma_ * std::pow(r0_ / z, alpha_);
        if (protocol_ == Protocol::Block || q_ == 1.0) {
            return -std::log1p(x);
        }
        return std::log1p(-q_ * x / (1.0 + x));
    }

    // int_0^L (1 - base^w) z dz, plus the doubling extension when requested.
    template <class V>
    Integral<V> pgfl_integral(V w) const
    {
        double const limit = quad_.outer_limit;
        auto integrand = [&](double z) -> V { return one_minus_exp(w * log_base(z)) * z; };
        Integral<V> out;
        bool const series = protocol_ == Protocol::Block || q_ == 1.0;
        if (series) {
            double const t_target = std::clamp(1.0 - 20.0 / std::max(std::abs(w), 1.0), 0.5, 0.99);
            double const t_limit = std::exp(log_base(limit));
            double const t1 = std::min(t_target, t_limit);
            double const z1 = std::min(radius_of(t1), limit);
            out.value = V(0.5 * z1 * z1) - near_field(w, t1);
            if (z1 < limit) {
                add(out, pieces<V>(integrand, z1, limit));
            }
        } else {
            out = pieces<V>(integrand, 0.0, limit);
        }
        if (quad_.infinite_plane) {
            extend(out, integrand, limit);
        }
        return out;
    }

    // int_0^L -log(base) z dz
    Integral<double> log_integral() const
    {
        auto integrand = [&](double z) { return -log_base(z) * z; };
        Integral<double> out = pieces<double>(integrand, 0.0, quad_.outer_limit);
        if (quad_.infinite_plane) {
            extend(out, integrand, quad_.outer_limit);
        }
        return out;
    }

  private:
    // z at which f(z) = t.
    double radius_of(double t) const { return r0_ * std::pow(gamma_ * t / (1.0 - t), 1.0 / alpha_); }

    // int_0^{z(t1)} f^w z dz. With t = f the integral becomes
    // (r0^2 gamma^a / alpha) int_0^t1 t^(w+a-1) (1-t)^-(a+1) dt; expanding the
    // binomial factor gives positive coefficients (a+1)_k / k!.
    template <class V>
    V near_field(V w, double t1) const
    {
        double const log_t1 = std::log(t1);
        V sum{};
        double d = 1.0;
        double power = std::pow(t1, a_);
        for (int k = 0; k < 1000000; ++k) {
            double const term = d * power;
            V const contribution = term / (w + a_ + static_cast<double>(k));
            sum += contribution;
            if (k > 8 && std::abs(contribution) < 1e-18 * std::abs(sum)) {
                double const c0 = r0_ * r0_ * std::pow(gamma_, a_) / alpha_;
                return c0 * std::exp(w * log_t1) * sum;
            }
            d *= (a_ + 1.0 + k) / (k + 1.0);
            power *= t1;
        }
        throw QuadratureFailure("near-field series did not converge", std::abs(sum));
    }

    template <class V, class F>
    Integral<V> pieces(F const& integrand, double lo, double hi) const
    {
        std::vector<double> cuts{lo};
        double const knee = r0_ * std::pow(gamma_, 1.0 / alpha_);
        for (double z = knee / 8.0; z < hi; z *= 2.0) {
            if (z > lo) {
                cuts.push_back(z);
            }
        }
        cuts.push_back(hi);
        double const abs_tol = quad_.abs_tol / std::max(scale(), 1e-300) / static_cast<double>(cuts.size() - 1);
        Integral<V> out;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            auto r = integrate<V>(integrand, cuts[i], cuts[i + 1], abs_tol, quad_.rel_tol, quad_.max_subdivisions);
            out.value += r.value;
            out.error += r.abs_error;
        }
        return out;
    }

    template <class V, class F>
    void extend(Integral<V>& out, F const& integrand, double limit) const
    {
        double const abs_tol = quad_.abs_tol / std::max(scale(), 1e-300);
        for (int i = 0; i < 80; ++i) {
            auto r = integrate<V>(integrand, limit, 2.0 * limit, abs_tol, quad_.rel_tol, quad_.max_subdivisions);
            out.value += r.value;
            out.error += r.abs_error;
            limit *= 2.0;
            if (std::abs(r.value) <= std::max(abs_tol, quad_.rel_tol * std::abs(out.value))) {
                return;
            }
        }
        throw QuadratureFailure("infinite-plane extension did not converge", out.error);
    }

    template <class V>
    static void add(Integral<V>& into, Integral<V> const& part)
    {
        into.value += part.value;
        into.error += part.error;
    }

    double q_;
    QuadratureSpec quad_;
    Protocol protocol_;
    double r0_ = 10.0;
    double alpha_ = 2.0;
    double gamma_ = 1.0;
    double a_ = 1.0;
    double lambda_ = 0.0;
    double weight_ = 1.0;
};

void check_q(double q, char const* who)
{
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidArgument(std::string(who) + ": q must lie in [0, 1]");
    }
}

void check_run_args(int T, int v, char const* who)
{
    if (T < 1 || v < 1 || v > T) {
        throw InvalidArgument(std::string(who) + ": need 1 <= v <= T");
    }
}

struct Moment
{
    long double value = 0.0L;
    long double error = 0.0L;
};

// Moments E[P^k] (block) or E[(q P)^k] (classical) for k = 0..max_order.
std::vector<Moment> moment_table(int max_order, double q, NetworkModel const& model, QuadratureSpec const& quad,
                                 Protocol protocol)
{
    std::vector<Moment> out(static_cast<std::size_t>(max_order) + 1);
    out[0] = {1.0L, 0.0L};
    Field const field(q, model, quad, protocol);
    double const noise = model.noise_exponent();
    for (int k = 1; k <= max_order; ++k) {
        double log_m = -k * noise;
        double err = 0.0;
        if (!field.trivial()) {
            auto const r = field.pgfl_integral(static_cast<double>(k));
            log_m -= field.scale() * r.value;
            err = field.scale() * r.error;
        }
        if (protocol == Protocol::Classical) {
            log_m += (q > 0.0) ? k * std::log(q) : -std::numeric_limits<double>::infinity();
        }
        long double const m = std::exp(static_cast<long double>(log_m));
        out[static_cast<std::size_t>(k)] = {m, m * static_cast<long double>(err)};
    }
    return out;
}

AnalyticValue finish(long double sum, long double magnitude, long double error, double leading)
{
    AnalyticValue out;
    out.value = std::clamp(static_cast<double>(leading * sum), 0.0, 1.0);
    out.abs_error = static_cast<double>(leading * error);
    long double const denom = std::max(std::abs(sum), 1e-300L);
    out.cancellation_ratio = static_cast<double>(magnitude / denom);
    out.precision_warning = out.cancellation_ratio > 1e6;
    return out;
}

}  // namespace

void QuadratureSpec::validate() const
{
    if (!(outer_limit > 0.0)) {
        throw InvalidArgument("QuadratureSpec: outer_limit must be > 0");
    }
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(cf_tol > 0.0)) {
        throw InvalidArgument("QuadratureSpec: tolerances must be > 0");
    }
    if (max_subdivisions < 1) {
        throw InvalidArgument("QuadratureSpec: max_subdivisions must be >= 1");
    }
    if (!(max_frequency > 0.0)) {
        throw InvalidArgument("QuadratureSpec: max_frequency must be > 0");
    }
}

void NetworkModel::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("NetworkModel: lambda must be finite and >= 0");
    }
    if (!(typical_distance > 0.0)) {
        throw InvalidArgument("NetworkModel: typical_distance must be > 0");
    }
    channel.validate();
}

void MetaQuery::validate() const
{
    check_run_args(T, v, "MetaQuery");
    if (!(beta > 0.0 && beta < 1.0)) {
        throw InvalidArgument("MetaQuery: beta must lie in (0, 1)");
    }
    if (!(q > 0.0 && q <= 1.0)) {
        throw InvalidArgument("MetaQuery: q must lie in (0, 1]");
    }
    model.validate();
}

double run_ccdf_demoivre(int T, int v, double p)
{
    check_run_args(T, v, "run_ccdf_demoivre");
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("run_ccdf_demoivre: p must lie in [0, 1]");
    }
    long double const pl = p;
    long double const ql = 1.0L - pl;
    long double sum = 0.0L;
    int const terms = (T + 1) / (v + 1);
    for (int l = 1; l <= terms; ++l) {
        long double const lead = pl + static_cast<long double>(T - l * v + 1) / l * ql;
        long double const term = lead * binomial_ld(T - l * v, l - 1) * std::pow(pl, static_cast<long double>(l * v))
                                 * std::pow(ql, static_cast<long double>(l - 1));
        sum += (l % 2 == 1) ? term : -term;
    }
    return std::clamp(static_cast<double>(sum), 0.0, 1.0);
}

double binomial_tail(int T, int v, double p)
{
    if (T < 0 || v < 0 || v > T) {
        throw InvalidArgument("binomial_tail: need 0 <= v <= T");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("binomial_tail: p must lie in [0, 1]");
    }
    if (v == 0 || p == 1.0) {
        return 1.0;
    }
    if (p == 0.0) {
        return 0.0;
    }
    long double const log_p = std::log(static_cast<long double>(p));
    long double const log_q = std::log1p(-static_cast<long double>(p));
    long double const log_fact_t = std::lgamma(static_cast<long double>(T) + 1.0L);
    long double sum = 0.0L;
    for (int l = v; l <= T; ++l) {
        long double const log_c = log_fact_t - std::lgamma(static_cast<long double>(l) + 1.0L)
                                  - std::lgamma(static_cast<long double>(T - l) + 1.0L);
        sum += std::exp(log_c + l * log_p + (T - l) * log_q);
    }
    return std::clamp(static_cast<double>(sum), 0.0, 1.0);
}

cplx interference_log_integral(cplx order, double q, NetworkModel const& model, QuadratureSpec const& quad,
                               Protocol protocol)
{
    check_q(q, "interference_log_integral");
    model.validate();
    quad.validate();
    Field const field(q, model, quad, protocol);
    if (field.trivial() || order == cplx{}) {
        return {};
    }
    return -field.scale() * field.pgfl_integral(order).value;
}

double interference_log_integral(double order, double q, NetworkModel const& model, QuadratureSpec const& quad,
                                 Protocol protocol)
{
    check_q(q, "interference_log_integral");
    model.validate();
    quad.validate();
    Field const field(q, model, quad, protocol);
    if (field.trivial() || order == 0.0) {
        return 0.0;
    }
    return -field.scale() * field.pgfl_integral(order).value;
}

double moment_zeta(int l, double q, NetworkModel const& model, QuadratureSpec const& quad, Protocol protocol)
{
    if (l < 1) {
        throw InvalidArgument("moment_zeta: l must be >= 1");
    }
    check_q(q, "moment_zeta");
    model.validate();
    quad.validate();
    double log_m = -l * model.noise_exponent() + interference_log_integral(static_cast<double>(l), q, model, quad,
                                                                           protocol);
    if (protocol == Protocol::Classical) {
        if (q == 0.0) {
            return 0.0;
        }
        log_m += l * std::log(q);
    }
    return std::exp(log_m);
}

cplx log_success_cf(double s, double q, NetworkModel const& model, QuadratureSpec const& quad, Protocol protocol)
{
    cplx const w{0.0, s};
    return -w * model.noise_exponent() + interference_log_integral(w, q, model, quad, protocol);
}

double mean_log_success(double q, NetworkModel const& model, QuadratureSpec const& quad, Protocol protocol)
{
    check_q(q, "mean_log_success");
    model.validate();
    quad.validate();
    Field const field(q, model, quad, protocol);
    double mean = -model.noise_exponent();
    if (!field.trivial()) {
        mean -= field.scale() * field.log_integral().value;
    }
    return mean;
}

AnalyticValue prob_block_controllable_restless(int T, int v, double q, NetworkModel const& model,
                                               QuadratureSpec const& quad, Protocol protocol)
{
    check_run_args(T, v, "prob_block_controllable_restless");
    check_q(q, "prob_block_controllable_restless");
    model.validate();
    quad.validate();
    if (q == 0.0) {
        return {};
    }
    auto const zeta = moment_table(T + 1, q, model, quad, protocol);
    long double sum = 0.0L;
    long double magnitude = 0.0L;
    long double error = 0.0L;
    int const terms = (T + 1) / (v + 1);
    // Each de Moivre term (c + (1 - c) p) C p^(lv) (1 - p)^(l-1), expanded in powers of p.
    for (int l = 1; l <= terms; ++l) {
        long double const c = static_cast<long double>(T - l * v + 1) / l;
        long double const outer = ((l % 2 == 1) ? 1.0L : -1.0L) * binomial_ld(T - l * v, l - 1);
        for (int i = 0; i <= l - 1; ++i) {
            long double const inner = outer * binomial_ld(l - 1, i) * ((i % 2 == 0) ? 1.0L : -1.0L);
            auto const& m0 = zeta[static_cast<std::size_t>(l * v + i)];
            auto const& m1 = zeta[static_cast<std::size_t>(l * v + i + 1)];
            long double const t0 = inner * c * m0.value;
            long double const t1 = inner * (1.0L - c) * m1.value;
            sum += t0 + t1;
            magnitude += std::abs(t0) + std::abs(t1);
            error += std::abs(inner * c) * m0.error + std::abs(inner * (1.0L - c)) * m1.error;
        }
    }
    double const leading = protocol == Protocol::Block ? q : 1.0;
    return finish(sum, magnitude, error, leading);
}

AnalyticValue prob_block_controllable_rested(int T, int v, double q, NetworkModel const& model,
                                             QuadratureSpec const& quad, Protocol protocol)
{
    check_run_args(T, v, "prob_block_controllable_rested");
    check_q(q, "prob_block_controllable_rested");
    model.validate();
    quad.validate();
    if (q == 0.0) {
        return {};
    }
    auto const zeta = moment_table(T, q, model, quad, protocol);
    long double sum = 0.0L;
    long double magnitude = 0.0L;
    long double error = 0.0L;
    // tail(p) = sum_{k>=v} (-1)^(k-v) C(T, k) C(k-1, v-1) p^k
    for (int k = v; k <= T; ++k) {
        long double const coeff = (((k - v) % 2 == 0) ? 1.0L : -1.0L) * binomial_ld(T, k) * binomial_ld(k - 1, v - 1);
        auto const& m = zeta[static_cast<std::size_t>(k)];
        sum += coeff * m.value;
        magnitude += std::abs(coeff * m.value);
        error += std::abs(coeff) * m.error;
    }
    double const leading = protocol == Protocol::Block ? q : 1.0;
    return finish(sum, magnitude, error, leading);
}

std::optional<double> inverse_tail_threshold(int T, int v, double q, double beta, Protocol protocol)
{
    check_run_args(T, v, "inverse_tail_threshold");
    check_q(q, "inverse_tail_threshold");
    if (!(beta > 0.0 && beta < 1.0)) {
        throw InvalidArgument("inverse_tail_threshold: beta must lie in (0, 1)");
    }
    auto level = [&](double p) {
        return protocol == Protocol::Block ? q * binomial_tail(T, v, p) : binomial_tail(T, v, q * p);
    };
    if (level(1.0) < beta) {
        return std::nullopt;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-13) {
        double const mid = 0.5 * (lo + hi);
        if (level(mid) >= beta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

AnalyticValue ccdf_from_cf(std::function<cplx(double)> const& log_cf, double x, double mean,
                           InversionOptions const& options)
{
    if (!(options.s_min > 0.0) || !(options.max_frequency > options.s_min) || !(options.tol > 0.0)) {
        throw InvalidArgument("ccdf_from_cf: invalid options");
    }
    auto exponent = [&](double s) { return cplx{0.0, -s * x} + log_cf(s); };
    auto integrand = [&](double s) { return std::exp(exponent(s)).imag() / s; };

    double const width = kPi / std::max({std::abs(x), std::abs(mean), std::abs(mean - x), 1.0});
    // Im(e^{-jsx} phi(s)) / s -> E[X] - x as s -> 0.
    double total = (mean - x) * options.s_min;
    double error = 0.0;
    double s = options.s_min;
    double tail_bound = 0.0;
    cplx tail{};
    for (;;) {
        double const next = std::min(s + width, options.max_frequency);
        auto const r = integrate_adaptive<double>(integrand, s, next, 0.01 * options.tol, 1e-9, 200);
        total += r.value;
        error += r.abs_error;
        s = next;

        // Integration by parts on [s, inf): int e^psi / u du ~ -e^psi(s) / (psi'(s) s).
        double const h = 1e-4 * std::max(1.0, s);
        cplx const psi = exponent(s);
        cplx const slope = (exponent(s + h) - exponent(s - h)) / (2.0 * h);
        double const amplitude = std::exp(psi.real());
        if (amplitude / s < options.tol) {
            tail = {};
            tail_bound = amplitude / s;
            break;
        }
        if (std::abs(slope) > 0.0) {
            tail = -std::exp(psi) / (slope * s);
            tail_bound = std::abs(tail);
            if (tail_bound < options.tol || s >= options.max_frequency) {
                break;
            }
        } else if (s >= options.max_frequency) {
            tail_bound = amplitude / s;
            break;
        }
    }
    AnalyticValue out;
    double const raw = 0.5 + (total + tail.imag()) / kPi;
    out.value = std::clamp(raw, 0.0, 1.0);
    out.abs_error = (error + tail_bound) / kPi;
    return out;
}

AnalyticValue meta_distribution_rested(MetaQuery const& query, QuadratureSpec const& quad, Protocol protocol)
{
    query.validate();
    quad.validate();
    auto const threshold = inverse_tail_threshold(query.T, query.v, query.q, query.beta, protocol);
    if (!threshold) {
        return {};
    }
    double const p_star = *threshold;
    NetworkModel const& model = query.model;
    double const weight = protocol == Protocol::Block ? query.q : 1.0;
    if (model.lambda * weight == 0.0) {
        AnalyticValue out;
        out.value = std::exp(-model.noise_exponent()) >= p_star ? 1.0 : 0.0;
        return out;
    }
    // The inversion only needs the exponent to ~1e-9; relax the radial tolerances.
    QuadratureSpec relaxed = quad;
    relaxed.abs_tol = std::max(quad.abs_tol, 1e-10);
    relaxed.rel_tol = std::max(quad.rel_tol, 1e-9);
    double const x = std::log(p_star);
    double const mean = mean_log_success(query.q, model, quad, protocol);
    InversionOptions options;
    options.max_frequency = quad.max_frequency;
    options.tol = quad.cf_tol;
    return ccdf_from_cf([&](double s) { return log_success_cf(s, query.q, model, relaxed, protocol); }, x, mean,
                        options);
}

}  // namespace ccnet
