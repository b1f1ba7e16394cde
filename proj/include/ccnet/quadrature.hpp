#pragma once

#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ccnet/errors.hpp"

namespace ccnet {

template <class T>
struct QuadResult
{
    T value{};
    double abs_error = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> const& z) { return std::abs(z); }
inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(std::complex<double> const& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <class T>
struct Panel
{
    double a;
    double b;
    T value;
    double error;

    bool operator<(Panel const& other) const { return error < other.error; }
};

// 21-point Kronrod rule with its embedded 10-point Gauss rule on [a, b].
template <class T, class F>
Panel<T> gk21(F& f, double a, double b)
{
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    static auto const& xk = gauss_kronrod<double, 21>::abscissa();
    static auto const& wk = gauss_kronrod<double, 21>::weights();
    static auto const& wg = gauss<double, 10>::weights();

    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);
    T const fc = f(center);
    T kronrod = wk[0] * fc;
    T gauss_sum{};
    for (std::size_t i = 1; i < xk.size(); ++i) {
        double const dx = half * xk[i];
        T const pair = f(center - dx) + f(center + dx);
        kronrod += wk[i] * pair;
        if (i % 2 == 1) {
            gauss_sum += wg[i / 2] * pair;
        }
    }
    kronrod *= half;
    gauss_sum *= half;
    if (!finite(kronrod)) {
        throw QuadratureFailure("quadrature: integrand is not finite", std::numeric_limits<double>::infinity());
    }
    return Panel<T>{a, b, kronrod, magnitude(kronrod - gauss_sum)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (10/21) quadrature over [a, b]: the panel
/// with the largest error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol |I|) or the panel budget runs out. Never throws on
/// non-convergence; check `converged`.
template <class T, class F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol, int max_subdivisions)
{
    QuadResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Panel<T>> heap;
    auto first = detail::gk21<T>(f, a, b);
    T total = first.value;
    double error = first.error;
    heap.push(first);
    int panels = 1;
    while (error > std::max(abs_tol, rel_tol * detail::magnitude(total)) && panels < max_subdivisions) {
        auto worst = heap.top();
        heap.pop();
        double const mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        auto left = detail::gk21<T>(f, worst.a, mid);
        auto right = detail::gk21<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Re-sum to shed the drift of the running updates.
    T exact_total{};
    double exact_error = 0.0;
    while (!heap.empty()) {
        exact_total += heap.top().value;
        exact_error += heap.top().error;
        heap.pop();
    }
    out.value = exact_total;
    out.abs_error = exact_error;
    out.subdivisions = panels;
    out.converged = exact_error <= std::max(abs_tol, rel_tol * detail::magnitude(exact_total));
    return out;
}

/// As integrate_adaptive, but throws QuadratureFailure carrying the achieved
/// error estimate when the tolerance is not met.
template <class T, class F>
QuadResult<T> integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_subdivisions)
{
    auto r = integrate_adaptive<T>(std::forward<F>(f), a, b, abs_tol, rel_tol, max_subdivisions);
    if (!r.converged) {
        throw QuadratureFailure("quadrature did not converge within " + std::to_string(max_subdivisions)
                                    + " subdivisions",
                                r.abs_error);
    }
    return r;
}

}  // namespace ccnet
