#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "ccnet/aloha.hpp"
#include "ccnet/channel.hpp"

namespace ccnet {

/// Numerical controls for the radial integrals and the characteristic-function
/// inversion.
struct QuadratureSpec
{
    double outer_limit = 500.0;   ///< L, upper end of every radial integral (the sampling window radius)
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;       ///< absolute tolerance on the PGFL exponent
    int max_subdivisions = 4000;  ///< panel budget per adaptive integral
    bool infinite_plane = false;  ///< extend L by doubling until the added shell is negligible (alpha > 2 only)
    double max_frequency = 1000;  ///< hard stop for the inversion integral in s
    double cf_tol = 1e-6;         ///< inversion stops once the tail estimate falls below this

    void validate() const;
};

/// Geometry and link budget seen by the typical pair.
struct NetworkModel
{
    double lambda = 0.0;
    double typical_distance = 10.0;
    ChannelParams channel;

    void validate() const;

    /// gamma N0 / (eta rho r0^-alpha)
    double noise_exponent() const { return channel.noise_exponent(typical_distance); }
};

struct MetaQuery
{
    int v = 4;
    double beta = 0.9;
    int T = 20;
    double q = 1.0;
    NetworkModel model;

    void validate() const;
};

/// Result of an analytic evaluation with its error budget.
struct AnalyticValue
{
    double value = 0.0;
    double abs_error = 0.0;
    double cancellation_ratio = 1.0;  ///< sum |terms| / |result| of an alternating expansion
    bool precision_warning = false;   ///< cancellation_ratio above 1e6
};

/// P(longest run of ones >= v) over T Bernoulli(p) trials, by the
/// alternating de Moivre sum in extended precision.
double run_ccdf_demoivre(int T, int v, double p);

/// P(Binomial(T, p) >= v), summed over log-space terms.
double binomial_tail(int T, int v, double p);

/// PGFL exponent of the interference field for a complex order w:
///   block:     -2 pi q lambda int_0^L (1 - f(z)^w) z dz
///   classical: -2 pi lambda   int_0^L (1 - (q f(z) + 1 - q)^w) z dz
/// with f(z) = 1 / (1 + gamma (r0 / z)^alpha). Throws QuadratureFailure when
/// the tolerance cannot be met.
std::complex<double> interference_log_integral(std::complex<double> order, double q, NetworkModel const& model,
                                               QuadratureSpec const& quad, Protocol protocol);

double interference_log_integral(double order, double q, NetworkModel const& model, QuadratureSpec const& quad,
                                 Protocol protocol);

/// Block: E[P_blk^l]. Classical: E[(q P_cls)^l].
double moment_zeta(int l, double q, NetworkModel const& model, QuadratureSpec const& quad, Protocol protocol);

/// log E[P^(js)] for P = P_blk (block) or P = P_cls (classical).
std::complex<double> log_success_cf(double s, double q, NetworkModel const& model, QuadratureSpec const& quad,
                                    Protocol protocol);

/// E[log P] for the same P.
double mean_log_success(double q, NetworkModel const& model, QuadratureSpec const& quad, Protocol protocol);

/// Probability that the typical restless loop is block controllable:
/// q E[F_run(P_blk)] for the block protocol, E[F_run(q P_cls)] for classical,
/// expanded into moments.
AnalyticValue prob_block_controllable_restless(int T, int v, double q, NetworkModel const& model,
                                               QuadratureSpec const& quad, Protocol protocol);

/// Rested counterpart: q E[tail(P_blk)] or E[tail(q P_cls)], via moments.
AnalyticValue prob_block_controllable_rested(int T, int v, double q, NetworkModel const& model,
                                             QuadratureSpec const& quad, Protocol protocol);

/// Smallest p in [0, 1] with q tail(p) >= beta (block) or tail(q p) >= beta
/// (classical), to 1e-12. Empty when p = 1 does not reach beta.
std::optional<double> inverse_tail_threshold(int T, int v, double q, double beta, Protocol protocol);

struct InversionOptions
{
    double s_min = 1e-6;
    double max_frequency = 1000.0;
    double tol = 1e-6;
};

/// P(X > x) from the log characteristic function of X, by the half-line
/// inversion integral 1/2 + (1/pi) int_0^inf Im(e^{-jsx} phi(s)) / s ds.
/// `mean` is E[X], used on (0, s_min). Past the last panel the tail is
/// estimated from one integration by parts.
AnalyticValue ccdf_from_cf(std::function<std::complex<double>(double)> const& log_cf, double x, double mean,
                           InversionOptions const& options);

/// Fraction of network realizations in which the rested loop is block
/// controllable in at least a beta fraction of blocks. Zero when the
/// threshold does not exist.
AnalyticValue meta_distribution_rested(MetaQuery const& query, QuadratureSpec const& quad, Protocol protocol);

}  // namespace ccnet
